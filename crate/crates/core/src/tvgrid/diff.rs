//! Forward differences with zero extension outside the image.
//!
//! The gradient lives on `(rows + 1) x (cols + 1)` nodes. Node `(a, b)` holds
//! the forward differences of the zero-padded image at pixel `(a - 1, b - 1)`,
//! so every pixel is coupled to the zero exterior across each boundary edge.

use std::f64::consts::PI;

use nalgebra::DMatrix;

/// Pair of node fields, row-major over `(rows + 1) x (cols + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradField {
    pub rows: usize,
    pub cols: usize,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
}

impl GradField {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let n = (rows + 1) * (cols + 1);
        Self {
            rows,
            cols,
            gx: vec![0.0; n],
            gy: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.gx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gx.is_empty()
    }

    pub fn magnitude(&self, k: usize) -> f64 {
        (self.gx[k] * self.gx[k] + self.gy[k] * self.gy[k]).sqrt()
    }

    pub fn max_magnitude(&self) -> f64 {
        (0..self.len()).fold(0.0, |m, k| m.max(self.magnitude(k)))
    }

    /// Sum of node magnitudes.
    pub fn l1(&self) -> f64 {
        (0..self.len()).map(|k| self.magnitude(k)).sum()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        let a: f64 = self.gx.iter().zip(&other.gx).map(|(x, y)| x * y).sum();
        let b: f64 = self.gy.iter().zip(&other.gy).map(|(x, y)| x * y).sum();
        a + b
    }

    pub fn axpy(&mut self, c: f64, other: &Self) {
        for (a, b) in self.gx.iter_mut().zip(&other.gx) {
            *a += c * b;
        }
        for (a, b) in self.gy.iter_mut().zip(&other.gy) {
            *a += c * b;
        }
    }

    pub fn scale(&mut self, c: f64) {
        self.gx.iter_mut().chain(self.gy.iter_mut()).for_each(|v| *v *= c);
    }

    /// Pointwise projection onto `{|p| <= radius}`.
    pub fn project(&mut self, radius: f64) {
        for k in 0..self.len() {
            let m = self.magnitude(k);
            if m > radius {
                let s = radius / m;
                self.gx[k] *= s;
                self.gy[k] *= s;
            }
        }
    }
}

pub fn grad(u: &[f64], rows: usize, cols: usize, out: &mut GradField) {
    debug_assert_eq!(u.len(), rows * cols);
    let w = cols + 1;
    // node row 0 sees only the zero row above the image
    for b in 0..=cols {
        out.gx[b] = 0.0;
        out.gy[b] = if b > 0 { u[b - 1] } else { 0.0 };
    }
    for a in 1..=rows {
        let row = &u[(a - 1) * cols..a * cols];
        let below = (a < rows).then(|| &u[a * cols..(a + 1) * cols]);
        let base = a * w;
        out.gx[base] = row[0];
        out.gy[base] = 0.0;
        for b in 1..=cols {
            let c = row[b - 1];
            let right = if b < cols { row[b] } else { 0.0 };
            let down = below.map_or(0.0, |r| r[b - 1]);
            out.gx[base + b] = right - c;
            out.gy[base + b] = down - c;
        }
    }
}

/// Adjoint of [`grad`].
pub fn grad_adjoint(p: &GradField, out: &mut [f64]) {
    let (rows, cols) = (p.rows, p.cols);
    let w = cols + 1;
    for i in 0..rows {
        for j in 0..cols {
            out[i * cols + j] =
                p.gx[(i + 1) * w + j] - p.gx[(i + 1) * w + j + 1] + p.gy[i * w + j + 1] - p.gy[(i + 1) * w + j + 1];
        }
    }
}

/// `grad_adjoint(grad(u))`: five-point Laplacian with zero exterior.
pub fn laplacian(u: &[f64], rows: usize, cols: usize, out: &mut [f64]) {
    for i in 0..rows {
        for j in 0..cols {
            let k = i * cols + j;
            let mut s = 4.0 * u[k];
            if i > 0 {
                s -= u[k - cols];
            }
            if i + 1 < rows {
                s -= u[k + cols];
            }
            if j > 0 {
                s -= u[k - 1];
            }
            if j + 1 < cols {
                s -= u[k + 1];
            }
            out[k] = s;
        }
    }
}

/// Unscaled isotropic total variation `sum |grad u|`.
pub fn total_variation(u: &[f64], rows: usize, cols: usize) -> f64 {
    let mut g = GradField::zeros(rows, cols);
    grad(u, rows, cols, &mut g);
    g.l1()
}

/// Direct solver for `laplacian(x) = b`, diagonalized by the type-I
/// discrete sine transform along each axis.
#[derive(Debug, Clone)]
pub struct PoissonSolver {
    rows: usize,
    cols: usize,
    sin_rows: DMatrix<f64>,
    sin_cols: DMatrix<f64>,
    eigen: DMatrix<f64>,
}

impl PoissonSolver {
    pub fn new(rows: usize, cols: usize) -> Self {
        let sines = |n: usize| {
            let c = PI / (n + 1) as f64;
            DMatrix::from_fn(n, n, |j, k| (c * ((j + 1) * (k + 1)) as f64).sin())
        };
        let ev = |n: usize, j: usize| 2.0 - 2.0 * (PI * (j + 1) as f64 / (n + 1) as f64).cos();
        let norm = 4.0 / ((rows + 1) * (cols + 1)) as f64;
        Self {
            rows,
            cols,
            sin_rows: sines(rows),
            sin_cols: sines(cols),
            eigen: DMatrix::from_fn(rows, cols, |j, k| norm / (ev(rows, j) + ev(cols, k))),
        }
    }

    /// Writes the solution into `x` and returns the residual norm.
    pub fn solve(&self, b: &[f64], x: &mut [f64]) -> f64 {
        let (rows, cols) = (self.rows, self.cols);
        let rhs = DMatrix::from_row_slice(rows, cols, b);
        let spectral = (&self.sin_rows * rhs * &self.sin_cols).component_mul(&self.eigen);
        let sol = &self.sin_rows * spectral * &self.sin_cols;
        for i in 0..rows {
            for j in 0..cols {
                x[i * cols + j] = sol[(i, j)];
            }
        }
        let mut ax = vec![0.0; rows * cols];
        laplacian(x, rows, cols, &mut ax);
        b.iter().zip(&ax).map(|(b, a)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
