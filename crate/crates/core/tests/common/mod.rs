//! Reference computations that share no code with the library.
#![allow(dead_code)]

use std::f64::consts::PI;

use statrs::function::erf::erf;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss-Legendre rule with `panels` equal panels.
pub fn composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let c = a + (p as f64 + 0.5) * w;
            rule.iter().map(|&(x, wt)| wt * f(c + 0.5 * w * x)).sum::<f64>() * 0.5 * w
        })
        .sum()
}

/// Gaussian of standard deviation `tau` convolved with the disk indicator,
/// at distance `r` from the disk center. The inner integral across the disk
/// is done in closed form with erf; the outer one over `t = R sin(theta)`.
pub fn disk_conv_oracle(tau: f64, radius: f64, r: f64, rule: &[(f64, f64)]) -> f64 {
    let s2 = std::f64::consts::SQRT_2 * tau;
    composite(
        |theta: f64| {
            let t = radius * theta.sin();
            let half = radius * theta.cos();
            let phi = (-(t - r) * (t - r) / (2.0 * tau * tau)).exp() / ((2.0 * PI).sqrt() * tau);
            phi * erf(half / s2) * radius * theta.cos()
        },
        -0.5 * PI,
        0.5 * PI,
        64,
        rule,
    )
}

/// Gaussian convolved with arc length on the circle, by the periodic
/// trapezoidal rule in the angle.
pub fn circle_conv_oracle(tau: f64, radius: f64, r: f64, m: usize) -> f64 {
    let t2 = 2.0 * tau * tau;
    let sum: f64 = (0..m)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / m as f64;
            (-((r - radius).powi(2) + 2.0 * r * radius * (1.0 - th.cos())) / t2).exp()
        })
        .sum();
    radius / (2.0 * PI * tau * tau) * sum * 2.0 * PI / m as f64
}

/// Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Empirical convergence orders `log2(e_k / e_{k+1})` for successive halvings.
pub fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}
