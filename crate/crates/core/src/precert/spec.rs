use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `u0 = sum_i a_i 1_{B(0, R_i)}` with `0 < R_1 < ... < R_N` and `a_i != 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleRadialSpec {
    radii: Vec<f64>,
    amplitudes: Vec<f64>,
}

impl SimpleRadialSpec {
    pub fn new(radii: Vec<f64>, amplitudes: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidInput("at least one radius is required".into()));
        }
        if radii.len() != amplitudes.len() {
            return Err(Error::InvalidInput(format!(
                "{} radii but {} amplitudes",
                radii.len(),
                amplitudes.len()
            )));
        }
        if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidInput("radii must be positive and finite".into()));
        }
        if radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("radii must be strictly increasing".into()));
        }
        if amplitudes.iter().any(|a| *a == 0.0 || !a.is_finite()) {
            return Err(Error::InvalidInput("amplitudes must be nonzero and finite".into()));
        }
        Ok(Self { radii, amplitudes })
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn sign(&self, i: usize) -> f64 {
        self.amplitudes[i].signum()
    }

    pub fn signs(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.signum()).collect()
    }

    pub fn perimeter(&self, i: usize) -> f64 {
        2.0 * PI * self.radii[i]
    }

    pub fn curvature(&self, i: usize) -> f64 {
        1.0 / self.radii[i]
    }

    pub fn outer_radius(&self) -> f64 {
        *self.radii.last().expect("nonempty by construction")
    }

    /// Same shapes with every amplitude negated.
    pub fn negated(&self) -> Self {
        Self {
            radii: self.radii.clone(),
            amplitudes: self.amplitudes.iter().map(|a| -a).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_specs() {
        assert!(SimpleRadialSpec::new(vec![], vec![]).is_err());
        assert!(SimpleRadialSpec::new(vec![1.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(SimpleRadialSpec::new(vec![1.5, 1.0], vec![1.0, 1.0]).is_err());
        assert!(SimpleRadialSpec::new(vec![0.0], vec![1.0]).is_err());
        assert!(SimpleRadialSpec::new(vec![1.0], vec![0.0]).is_err());
        assert!(SimpleRadialSpec::new(vec![1.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn derived_geometry() {
        let s = SimpleRadialSpec::new(vec![0.5, 2.0], vec![3.0, -0.1]).unwrap();
        assert_eq!(s.signs(), vec![1.0, -1.0]);
        assert!((s.perimeter(1) - 4.0 * PI).abs() < 1e-15);
        assert_eq!(s.curvature(0), 2.0);
        assert_eq!(s.negated().signs(), vec![-1.0, 1.0]);
    }
}
