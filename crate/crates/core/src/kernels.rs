//! Gaussian convolutions of centered disks and circles, evaluated as
//! functions of the distance to the origin.
//!
//! `tau` is always the standard deviation of the isotropic Gaussian being
//! convolved. Blurring twice with a kernel of width `sigma` is a single
//! blur of width `sigma * sqrt(2)`, which is what the certificate code
//! passes in.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bessel::{i0e, i1e};
use crate::error::{Error, Result};
use crate::quadrature::integrate_panels;

/// Absolute tolerance for every kernel quadrature.
pub const KERNEL_TOL: f64 = 1e-13;

/// Beyond this many standard deviations the Gaussian factor is below 1e-31.
const TRUNCATION: f64 = 12.0;

/// How a user-supplied width parameter maps to the Gaussian standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthConvention {
    /// The parameter is the standard deviation (covariance `sigma^2 Id`).
    #[default]
    StandardDeviation,
    /// The parameter is the variance; the standard deviation is its root.
    Variance,
}

impl std::str::FromStr for WidthConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "std" | "standard_deviation" => Ok(Self::StandardDeviation),
            "variance" | "var" => Ok(Self::Variance),
            other => Err(Error::InvalidInput(format!("unknown width convention `{other}`"))),
        }
    }
}

/// Normalized isotropic 2D Gaussian `(2 pi sigma^2)^-1 exp(-|x|^2 / 2 sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianKernel {
    sigma: f64,
}

impl GaussianKernel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "kernel width must be positive, got {sigma}"
            )));
        }
        Ok(Self { sigma })
    }

    pub fn from_parameter(value: f64, convention: WidthConvention) -> Result<Self> {
        match convention {
            WidthConvention::StandardDeviation => Self::new(value),
            WidthConvention::Variance => {
                if !(value > 0.0) {
                    return Err(Error::InvalidInput(format!("variance must be positive, got {value}")));
                }
                Self::new(value.sqrt())
            }
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn eval(&self, distance: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        (-(distance * distance) / (2.0 * s2)).exp() / (2.0 * PI * s2)
    }

    /// Width of `h * h`.
    pub fn doubled(&self) -> f64 {
        self.sigma * std::f64::consts::SQRT_2
    }
}

/// A radial function sampled on an increasing grid of radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    grid: Vec<f64>,
    values: Vec<f64>,
    pub meta: String,
}

impl RadialProfile {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, meta: impl Into<String>) -> Result<Self> {
        validate_grid(&grid)?;
        if grid.len() != values.len() {
            return Err(Error::dims(grid.len(), values.len()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("profile value {v} is not finite")));
        }
        Ok(Self {
            grid,
            values,
            meta: meta.into(),
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.iter().copied().zip(self.values.iter().copied())
    }

    /// Two-column CSV `r,value` at 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "r,value")?;
        for (r, v) in self.iter() {
            writeln!(out, "{r:.16e},{v:.16e}")?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(file)
    }
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty radial grid".into()));
    }
    if !(grid[0] >= 0.0) {
        return Err(Error::InvalidInput(format!("radial grid starts at {}", grid[0])));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidInput(
            "radial grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

#[inline]
fn gauss_ratio(tau: f64, a: f64, b: f64) -> f64 {
    let d = a - b;
    (-(d * d) / (2.0 * tau * tau)).exp()
}

/// `(g_tau * 1_{B(0,R)})(r)`.
pub fn disk_conv(tau: f64, radius: f64, r: f64) -> f64 {
    let t2 = tau * tau;
    let lo = (r - TRUNCATION * tau).max(0.0);
    let hi = (r + TRUNCATION * tau).min(radius);
    if lo >= hi {
        return 0.0;
    }
    let integrand = |s: f64| s / t2 * gauss_ratio(tau, r, s) * i0e(r * s / t2);
    integrate_panels(&integrand, lo, hi, 4.0 * tau, KERNEL_TOL).clamp(0.0, 1.0)
}

/// `(g_tau * H^1 restricted to the circle of radius R)(r)`.
pub fn circle_conv(tau: f64, radius: f64, r: f64) -> f64 {
    let t2 = tau * tau;
    radius / t2 * gauss_ratio(tau, r, radius) * i0e(r * radius / t2)
}

/// Radial derivative of [`disk_conv`]: minus the Gaussian flux through the circle.
pub fn disk_conv_dr(tau: f64, radius: f64, r: f64) -> f64 {
    let t2 = tau * tau;
    -radius / t2 * gauss_ratio(tau, r, radius) * i1e(r * radius / t2)
}

/// Radial derivative of [`circle_conv`].
pub fn circle_conv_dr(tau: f64, radius: f64, r: f64) -> f64 {
    let t2 = tau * tau;
    let x = r * radius / t2;
    radius / t2 * gauss_ratio(tau, r, radius) * (radius * i1e(x) - r * i0e(x)) / t2
}

/// `int_0^r disk_conv(tau, R, s) s ds`, i.e. the blurred disk mass inside
/// `B(0, r)` divided by `2 pi`.
pub fn disk_moment(tau: f64, radius: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    // disk_conv is within 1e-31 of zero past R + 12 tau
    let upper = r.min(radius + TRUNCATION * tau);
    integrate_panels(
        &|s: f64| disk_conv(tau, radius, s) * s,
        0.0,
        upper,
        2.0 * tau,
        KERNEL_TOL,
    )
}

/// `int_0^r circle_conv(tau, R, s) s ds`; by symmetry of the Gaussian this
/// is `R * disk_conv(tau, r, R)`.
pub fn circle_moment(tau: f64, radius: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    radius * disk_conv(tau, r, radius)
}
