use serde::{Deserialize, Serialize};

use super::diff::{dot, grad, grad_adjoint, GradField, PoissonSolver};
use super::image::GridImage;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnormParams {
    pub max_iter: usize,
    /// Stop when `(upper - lower) <= rel_tol * upper`.
    pub rel_tol: f64,
    pub check_every: usize,
}

impl Default for GnormParams {
    fn default() -> Self {
        Self {
            max_iter: 100_000,
            rel_tol: 1e-2,
            check_every: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnormResult {
    /// Upper bound, attained by an exactly divergence-feasible field.
    pub value: f64,
    /// Lower bound `<eta, u> / TV_h(u)` from the dual iterate.
    pub lower: f64,
    pub iterations: usize,
}

impl GnormResult {
    /// Whether `eta` lies in the discrete subdifferential of TV at zero.
    pub fn is_dual_feasible(&self, tol: f64) -> bool {
        self.value <= 1.0 + tol
    }
}

/// Discrete polar norm `sup { <eta, u>_h : TV_h(u) <= 1 }`, where
/// `<eta, u>_h = h^2 sum eta u` and `TV_h(u) = h sum |grad u|`.
///
/// Computed as `h * min { max |z| : grad^T z = eta }` by a primal-dual
/// iteration; the returned value comes from a Poisson-corrected feasible `z`.
pub fn discrete_gnorm(eta: &GridImage, params: &GnormParams) -> Result<GnormResult> {
    if params.check_every == 0 || params.max_iter == 0 || !(params.rel_tol > 0.0) {
        return Err(Error::InvalidInput("gnorm parameters must be positive".into()));
    }
    let scale = eta.max_abs();
    if scale == 0.0 {
        return Ok(GnormResult {
            value: 0.0,
            lower: 0.0,
            iterations: 0,
        });
    }
    let (rows, cols) = (eta.rows(), eta.cols());
    let n = rows * cols;
    let h = eta.pixel_size();
    let b: Vec<f64> = eta.data().iter().map(|v| v / scale).collect();

    // tau * sigma * |grad|^2 < 1 with |grad|^2 <= 8. The field z grows with
    // the grid while the multiplier u spreads a unit TV budget over it; the
    // ratio below was tuned on radial certificates from 100^2 to 300^2.
    let ratio = (rows * cols) as f64;
    let (tau, sigma) = (0.35 * ratio, 0.35 / ratio);
    let mut z = GradField::zeros(rows, cols);
    let mut z_old = GradField::zeros(rows, cols);
    let mut z_bar = GradField::zeros(rows, cols);
    let mut u = vec![0.0; n];
    let mut div = vec![0.0; n];
    let mut g = GradField::zeros(rows, cols);
    let mut w = vec![0.0; n];
    let poisson = PoissonSolver::new(rows, cols);
    let mut gw = GradField::zeros(rows, cols);
    let mut mags = vec![0.0; z.len()];
    let mut level = 0.0;
    let mut best_upper = f64::INFINITY;
    let mut best_lower = 0.0f64;

    for it in 1..=params.max_iter {
        z_old.gx.copy_from_slice(&z.gx);
        z_old.gy.copy_from_slice(&z.gy);

        grad_adjoint(&z_bar, &mut div);
        for k in 0..n {
            u[k] += sigma * (div[k] - b[k]);
        }
        grad(&u, rows, cols, &mut g);
        z.axpy(-tau, &g);
        level = prox_max_norm(&mut z, tau, level, &mut mags);
        for k in 0..z.len() {
            z_bar.gx[k] = 2.0 * z.gx[k] - z_old.gx[k];
            z_bar.gy[k] = 2.0 * z.gy[k] - z_old.gy[k];
        }

        if it % params.check_every == 0 || it == params.max_iter {
            grad_adjoint(&z, &mut div);
            let rhs: Vec<f64> = b.iter().zip(&div).map(|(b, d)| b - d).collect();
            let residual = poisson.solve(&rhs, &mut w);
            grad(&w, rows, cols, &mut gw);
            gw.axpy(1.0, &z);
            // leftover divergence error, kept as a margin
            best_upper = best_upper.min(gw.max_magnitude() + residual);
            grad(&u, rows, cols, &mut g);
            let tv = g.l1();
            if tv > 0.0 {
                best_lower = best_lower.max(-dot(&b, &u) / tv);
            }
            if best_upper - best_lower <= params.rel_tol * best_upper {
                return Ok(GnormResult {
                    value: h * scale * best_upper,
                    lower: h * scale * best_lower,
                    iterations: it,
                });
            }
        }
    }
    Err(Error::NotConverged {
        gap: (best_upper - best_lower) / best_upper,
        iterations: params.max_iter,
        last: None,
    })
}

/// Prox of `tau * max_k |v_k|`: clips magnitudes at the level `t` solving
/// `sum max(|v_k| - t, 0) = tau`. `hint` warm-starts the search.
fn prox_max_norm(v: &mut GradField, tau: f64, hint: f64, mags: &mut [f64]) -> f64 {
    for (k, m) in mags.iter_mut().enumerate() {
        *m = v.magnitude(k);
    }
    let excess = |t: f64| -> (f64, usize) {
        let mut s = 0.0;
        let mut c = 0;
        for &m in mags.iter() {
            if m > t {
                s += m - t;
                c += 1;
            }
        }
        (s - tau, c)
    };
    let (e0, _) = excess(0.0);
    if e0 <= 0.0 {
        v.scale(0.0);
        return 0.0;
    }
    // the excess is convex and decreasing, so a tangent step from a point
    // right of the root lands left of it, and Newton from the left is monotone
    let mut t = hint.max(0.0);
    let (e, c) = excess(t);
    if e < 0.0 {
        t = if c > 0 {
            t + e / c as f64
        } else {
            mags.iter().fold(0.0f64, |a, &m| a.max(m)) - tau
        };
        t = t.max(0.0);
    }
    for _ in 0..200 {
        let (e, c) = excess(t);
        if e <= 0.0 || c == 0 {
            break;
        }
        let next = t + e / c as f64;
        if next <= t {
            break;
        }
        t = next;
    }
    v.project(t);
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prox_clips_to_budget() {
        let mut v = GradField::zeros(1, 1);
        v.gx = vec![3.0, 1.0, 0.0, 0.0];
        v.gy = vec![0.0, 0.0, 2.0, 0.5];
        let t = prox_max_norm(&mut v, 1.5, 0.0, &mut [0.0; 4]);
        // level t solves (3 - t) + (2 - t) = 1.5
        assert!((t - 1.75).abs() < 1e-14);
        assert!((v.magnitude(0) - 1.75).abs() < 1e-14);
        assert!((v.magnitude(2) - 1.75).abs() < 1e-14);
        assert_eq!(v.magnitude(1), 1.0);
        let mut small = GradField::zeros(1, 1);
        small.gx = vec![0.1, 0.0, 0.0, 0.0];
        assert_eq!(prox_max_norm(&mut small, 1.0, 0.0, &mut [0.0; 4]), 0.0);
        assert_eq!(small.max_magnitude(), 0.0);
    }

    #[test]
    fn zero_has_zero_norm() {
        let eta = GridImage::zeros(5, 5, 0.1).unwrap();
        assert_eq!(discrete_gnorm(&eta, &GnormParams::default()).unwrap().value, 0.0);
    }

    #[test]
    fn single_pixel_bound() {
        // for eta = e_0 on a one-pixel grid the best field puts equal
        // magnitude on its four boundary edges
        let eta = GridImage::new(1, 1, 1.0, vec![1.0]).unwrap();
        let r = discrete_gnorm(
            &eta,
            &GnormParams {
                rel_tol: 1e-6,
                ..Default::default()
            },
        )
        .unwrap();
        // lower bound from u = -e_0 is 1 / (2 + sqrt 2)
        let expected = 1.0 / (2.0 + 2f64.sqrt());
        assert!((r.value - expected).abs() < 1e-5, "{r:?}");
        assert!(r.lower <= r.value);
    }
}
