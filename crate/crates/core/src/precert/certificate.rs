use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::gram::{assemble_gram, GramSystem};
use super::SimpleRadialSpec;
use crate::error::{Error, Result};
use crate::kernels::{circle_conv, circle_conv_dr, disk_conv, disk_conv_dr, validate_grid, RadialProfile, KERNEL_TOL};
use crate::quadrature::{cumulative_integral, integrate_panels};
use crate::tvgrid::GridImage;

/// Least-norm solution of the zeroth/first order constraints, expressed by
/// its multipliers on the blurred disks (`alpha`) and blurred circles (`beta`).
///
/// Immutable once built; every evaluator is a pure function of `r`.
#[derive(Debug, Clone, Serialize)]
pub struct Precertificate {
    spec: SimpleRadialSpec,
    sigma: f64,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    #[serde(skip)]
    gram: DMatrix<f64>,
    #[serde(skip)]
    rhs: DVector<f64>,
    condition: f64,
    ridge: f64,
}

impl Precertificate {
    pub fn spec(&self) -> &SimpleRadialSpec {
        &self.spec
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Width of the doubled kernel `h * h`.
    pub fn tau(&self) -> f64 {
        self.sigma * std::f64::consts::SQRT_2
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Diagonal shift applied when the plain factorization failed (usually 0).
    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    /// `max |gram * x - rhs|`.
    pub fn constraint_residual(&self) -> f64 {
        let x = DVector::from_iterator(self.alpha.len() * 2, self.alpha.iter().chain(self.beta.iter()).copied());
        (&self.gram * x - &self.rhs).amax()
    }

    /// `eta_v(r)`.
    pub fn eta(&self, r: f64) -> f64 {
        let tau = self.tau();
        self.spec
            .radii()
            .iter()
            .zip(self.alpha.iter().zip(&self.beta))
            .map(|(&radius, (&a, &b))| a * disk_conv(tau, radius, r) + b * circle_conv(tau, radius, r))
            .sum()
    }

    /// `d eta_v / dr`.
    pub fn eta_dr(&self, r: f64) -> f64 {
        let tau = self.tau();
        self.spec
            .radii()
            .iter()
            .zip(self.alpha.iter().zip(&self.beta))
            .map(|(&radius, (&a, &b))| a * disk_conv_dr(tau, radius, r) + b * circle_conv_dr(tau, radius, r))
            .sum()
    }

    /// `int_a^b eta_v(s) s ds` by adaptive quadrature.
    pub fn moment_between(&self, a: f64, b: f64) -> f64 {
        integrate_panels(&|s: f64| self.eta(s) * s, a, b, self.tau(), KERNEL_TOL)
    }

    /// `F(r) = int_0^r eta_v(s) s ds`.
    pub fn moment(&self, r: f64) -> f64 {
        self.moment_between(0.0, r)
    }

    /// `int_0^inf eta_v(s) s ds`, exact from the kernel masses.
    pub fn total_moment(&self) -> f64 {
        self.spec
            .radii()
            .iter()
            .zip(self.alpha.iter().zip(&self.beta))
            .map(|(&radius, (&a, &b))| a * 0.5 * radius * radius + b * radius)
            .sum()
    }

    /// `f_v(r) = F(r) / r`, with `f_v(0) = 0`.
    pub fn fv(&self, r: f64) -> f64 {
        if r <= 0.0 {
            0.0
        } else {
            self.moment(r) / r
        }
    }

    /// `f_v'(r) = eta_v(r) - F(r) / r^2`.
    pub fn fv_dr(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        self.eta(r) - self.moment(r) / (r * r)
    }

    /// `sign_i / R_i^2 + eta_v'(R_i)`: the value `f_v''(R_i)` takes once both
    /// constraints hold at `R_i`.
    pub fn fv_second_closed_form(&self, i: usize) -> f64 {
        let radius = self.spec.radii()[i];
        self.spec.sign(i) / (radius * radius) + self.eta_dr(radius)
    }

    /// `f_v''(r)` by Richardson-extrapolated central differences of `F / r`.
    pub fn fv_second_numeric(&self, r: f64) -> f64 {
        let h = 2e-3 * self.tau().min(r);
        let base = self.moment(r);
        let f = |x: f64| (base + self.moment_between(r, x)) / x;
        let f0 = base / r;
        let d2 = |step: f64| (f(r + step) - 2.0 * f0 + f(r - step)) / (step * step);
        let coarse = d2(h);
        let fine = d2(0.5 * h);
        (4.0 * fine - coarse) / 3.0
    }

    /// `f_v` sampled on `grid` (strictly increasing, starting at 0) by
    /// accumulating adaptive integrals of `eta_v(s) s` interval by interval.
    pub fn eval_fv(&self, grid: &[f64]) -> Result<RadialProfile> {
        validate_grid(grid)?;
        if grid[0] != 0.0 {
            return Err(Error::InvalidInput("f_v grid must start at r = 0".into()));
        }
        let moments = self.cumulative_moments(grid);
        let values = grid
            .iter()
            .zip(&moments)
            .map(|(&r, &m)| if r > 0.0 { m / r } else { 0.0 })
            .collect();
        RadialProfile::new(grid.to_vec(), values, "f_v")
    }

    pub(crate) fn cumulative_moments(&self, grid: &[f64]) -> Vec<f64> {
        let mut out = cumulative_integral(&|s: f64| self.eta(s) * s, grid, self.tau(), KERNEL_TOL);
        if let Some(&first) = grid.first() {
            if first > 0.0 {
                let offset = self.moment(first);
                out.iter_mut().for_each(|m| *m += offset);
            }
        }
        out
    }

    /// `eta_v` sampled on `grid`.
    pub fn eta_profile(&self, grid: &[f64]) -> Result<RadialProfile> {
        validate_grid(grid)?;
        RadialProfile::new(grid.to_vec(), grid.iter().map(|&r| self.eta(r)).collect(), "eta_v")
    }

    /// Samples `eta_v(|x|)` at pixel centers of a grid centered on the origin.
    pub fn eta_image(&self, rows: usize, cols: usize, pixel_size: f64) -> Result<GridImage> {
        GridImage::from_fn(rows, cols, pixel_size, |x, y| self.eta(x.hypot(y)))
    }
}

/// Builds the pre-certificate by Cholesky solve of the Gram system.
pub fn solve_precert(spec: &SimpleRadialSpec, sigma: f64) -> Result<Precertificate> {
    let GramSystem { matrix, rhs, condition } = assemble_gram(spec, sigma)?;
    let n = spec.len();
    let mut ridge = 0.0;
    let solution = match matrix.clone().cholesky() {
        Some(chol) => chol.solve(&rhs),
        None => {
            ridge = 1e-12 * matrix.trace() / (2 * n) as f64;
            log::warn!("Gram factorization failed; retrying with diagonal shift {ridge:.3e}");
            let shifted = &matrix + DMatrix::<f64>::identity(2 * n, 2 * n) * ridge;
            shifted
                .cholesky()
                .ok_or(Error::Conditioning {
                    condition,
                    limit: super::gram::MAX_CONDITION,
                })?
                .solve(&rhs)
        }
    };
    Ok(Precertificate {
        spec: spec.clone(),
        sigma,
        alpha: solution.rows(0, n).iter().copied().collect(),
        beta: solution.rows(n, n).iter().copied().collect(),
        gram: matrix,
        rhs,
        condition,
        ridge,
    })
}
