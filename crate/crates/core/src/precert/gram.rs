use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::SimpleRadialSpec;
use crate::error::{Error, Result};
use crate::kernels::{circle_conv, disk_conv, disk_moment};

/// Largest accepted eigenvalue ratio of the Gram matrix.
pub const MAX_CONDITION: f64 = 1e14;

/// Normal equations of the least-norm problem: `matrix * (alpha, beta) = rhs`.
#[derive(Debug, Clone)]
pub struct GramSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub condition: f64,
}

/// Pairwise inner products of `h * 1_{E_i}` (first block) and
/// `h * H^1|dE_i` (second block), with the right-hand side
/// `(sign_i P(E_i))_i ++ (sign_i 2 pi)_i`.
pub fn assemble_gram(spec: &SimpleRadialSpec, sigma: f64) -> Result<GramSystem> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
    }
    let n = spec.len();
    let tau = sigma * std::f64::consts::SQRT_2;
    let radii = spec.radii();
    let mut g = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = 2.0 * PI * disk_moment(tau, radii[i], radii[j]);
            g[(i, n + j)] = 2.0 * PI * radii[j] * disk_conv(tau, radii[i], radii[j]);
            g[(n + i, n + j)] = 2.0 * PI * radii[j] * circle_conv(tau, radii[i], radii[j]);
        }
    }
    for i in 0..n {
        for j in 0..n {
            g[(n + j, i)] = g[(i, n + j)];
        }
    }
    let sym = (&g + g.transpose()) * 0.5;

    let mut rhs = DVector::<f64>::zeros(2 * n);
    for i in 0..n {
        rhs[i] = spec.sign(i) * spec.perimeter(i);
        rhs[n + i] = spec.sign(i) * 2.0 * PI;
    }

    let condition = condition_number(&sym);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Conditioning {
            condition,
            limit: MAX_CONDITION,
        });
    }
    Ok(GramSystem {
        matrix: sym,
        rhs,
        condition,
    })
}

/// Eigenvalue ratio; infinite when the matrix is not positive definite.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(m.clone());
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Smallest eigenvalue, the numerical witness of injectivity of the
/// combined disk/circle synthesis operator.
pub fn smallest_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}
