//! First and second shape derivatives of the prescribed-curvature
//! objective `P(E) - int_E eta` on sampled closed curves.
//!
//! Integrals over the curve use trapezoidal weights `(ds_{i-1} + ds_i) / 2`
//! and tangential derivatives use centered arc-length differences with
//! periodic indexing.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed curve sampled in arc-length order. Segment `i` joins point `i`
/// to point `i + 1` (and the last point back to the first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    points: Vec<[f64; 2]>,
    arclength: Vec<f64>,
    normal: Vec<[f64; 2]>,
    curvature: Vec<f64>,
}

impl CurveSample {
    /// Counterclockwise samples of a circle with exact arc-length elements,
    /// normals and curvature `1/R`.
    pub fn circle(center: [f64; 2], radius: f64, m: usize) -> Result<Self> {
        if !(radius > 0.0) || m < 3 {
            return Err(Error::InvalidInput(format!(
                "circle needs R > 0 and M >= 3, got R={radius}, M={m}"
            )));
        }
        let step = 2.0 * PI / m as f64;
        let ds = radius * step;
        let (mut points, mut normal) = (Vec::with_capacity(m), Vec::with_capacity(m));
        for k in 0..m {
            let (s, c) = (step * k as f64).sin_cos();
            points.push([center[0] + radius * c, center[1] + radius * s]);
            normal.push([c, s]);
        }
        Self::from_parts(points, vec![ds; m], normal, vec![1.0 / radius; m])
    }

    /// Counterclockwise polygon; normals from centered tangents and
    /// curvature from turning angles, so the total turning is exactly
    /// `2 pi` for a simple positively oriented curve.
    pub fn from_points(points: Vec<[f64; 2]>) -> Result<Self> {
        let m = points.len();
        if m < 3 {
            return Err(Error::InvalidInput("a closed curve needs at least 3 points".into()));
        }
        let seg = |i: usize| {
            let (p, q) = (points[i], points[(i + 1) % m]);
            [q[0] - p[0], q[1] - p[1]]
        };
        let arclength: Vec<f64> = (0..m).map(|i| seg(i)[0].hypot(seg(i)[1])).collect();
        if arclength.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::InvalidInput("repeated consecutive points".into()));
        }
        let mut normal = Vec::with_capacity(m);
        let mut curvature = Vec::with_capacity(m);
        for i in 0..m {
            let prev = seg((i + m - 1) % m);
            let next = seg(i);
            let tx = prev[0] / arclength[(i + m - 1) % m] + next[0] / arclength[i];
            let ty = prev[1] / arclength[(i + m - 1) % m] + next[1] / arclength[i];
            let t = tx.hypot(ty);
            normal.push([ty / t, -tx / t]);
            let turn = (prev[0] * next[1] - prev[1] * next[0]).atan2(prev[0] * next[0] + prev[1] * next[1]);
            curvature.push(turn / (0.5 * (arclength[(i + m - 1) % m] + arclength[i])));
        }
        Self::from_parts(points, arclength, normal, curvature)
    }

    pub fn from_parts(
        points: Vec<[f64; 2]>,
        arclength: Vec<f64>,
        normal: Vec<[f64; 2]>,
        curvature: Vec<f64>,
    ) -> Result<Self> {
        let m = points.len();
        if m < 3 {
            return Err(Error::InvalidInput("a closed curve needs at least 3 points".into()));
        }
        for (name, len) in [
            ("arclength", arclength.len()),
            ("normal", normal.len()),
            ("curvature", curvature.len()),
        ] {
            if len != m {
                return Err(Error::dims(format!("{m} {name} entries"), len));
            }
        }
        if arclength.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidInput("segment lengths must be positive".into()));
        }
        if normal.iter().any(|n| (n[0].hypot(n[1]) - 1.0).abs() > 1e-10) {
            return Err(Error::InvalidInput("normals must be unit vectors".into()));
        }
        Ok(Self {
            points,
            arclength,
            normal,
            curvature,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn arclength(&self) -> &[f64] {
        &self.arclength
    }

    pub fn normals(&self) -> &[[f64; 2]] {
        &self.normal
    }

    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    pub fn perimeter(&self) -> f64 {
        self.arclength.iter().sum()
    }

    /// Trapezoidal weight of point `i`.
    pub fn weight(&self, i: usize) -> f64 {
        let m = self.len();
        0.5 * (self.arclength[(i + m - 1) % m] + self.arclength[i])
    }

    /// `int H dH^1`.
    pub fn total_turning(&self) -> f64 {
        (0..self.len()).map(|i| self.curvature[i] * self.weight(i)).sum()
    }

    /// Centered arc-length derivative of `psi` at each point.
    pub fn tangential_gradient(&self, psi: &FieldOnCurve) -> Result<Vec<f64>> {
        self.check(psi)?;
        let m = self.len();
        let v = &psi.values;
        Ok((0..m)
            .map(|i| {
                let (p, n) = ((i + m - 1) % m, (i + 1) % m);
                (v[n] - v[p]) / (self.arclength[p] + self.arclength[i])
            })
            .collect())
    }

    /// `int (psi^2 + |grad_tau psi|^2) dH^1`.
    pub fn h1_norm_sq(&self, psi: &FieldOnCurve) -> Result<f64> {
        let grad = self.tangential_gradient(psi)?;
        Ok((0..self.len())
            .map(|i| self.weight(i) * (psi.values[i].powi(2) + grad[i].powi(2)))
            .sum())
    }

    fn check(&self, field: &FieldOnCurve) -> Result<()> {
        if field.values.len() != self.len() {
            return Err(Error::dims(format!("{} curve samples", self.len()), field.values.len()));
        }
        Ok(())
    }

    /// CSV with columns `x,y,H`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,y,H")?;
        for (p, h) in self.points.iter().zip(&self.curvature) {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", p[0], p[1], h)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

/// Scalar samples at the points of a [`CurveSample`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldOnCurve {
    pub values: Vec<f64>,
}

impl FieldOnCurve {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("field values must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn constant(value: f64, m: usize) -> Self {
        Self { values: vec![value; m] }
    }

    /// Samples `f(point, normal)` along the curve.
    pub fn sample(curve: &CurveSample, f: impl Fn([f64; 2], [f64; 2]) -> f64) -> Self {
        Self {
            values: curve.points.iter().zip(&curve.normal).map(|(&p, &n)| f(p, n)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// First shape derivative `int (H - eta) psi dH^1`.
pub fn j1(curve: &CurveSample, eta: &FieldOnCurve, psi: &FieldOnCurve) -> Result<f64> {
    curve.check(eta)?;
    curve.check(psi)?;
    Ok((0..curve.len())
        .map(|i| curve.weight(i) * (curve.curvature[i] - eta.values[i]) * psi.values[i])
        .sum())
}

/// Second shape derivative
/// `int |grad_tau psi|^2 - (H eta + d eta / d nu) psi^2 dH^1`.
pub fn j2(curve: &CurveSample, eta: &FieldOnCurve, deta_dnu: &FieldOnCurve, psi: &FieldOnCurve) -> Result<f64> {
    curve.check(eta)?;
    curve.check(deta_dnu)?;
    let grad = curve.tangential_gradient(psi)?;
    Ok((0..curve.len())
        .map(|i| {
            let potential = curve.curvature[i] * eta.values[i] + deta_dnu.values[i];
            curve.weight(i) * (grad[i] * grad[i] - potential * psi.values[i].powi(2))
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMode {
    pub k: usize,
    pub quotient: f64,
}

/// H^1-normalized Rayleigh quotients of `cos(k theta)` on a circle where the
/// potential `H^2 + d xi / d nu` is the constant `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleSpectrum {
    pub radius: f64,
    pub c: f64,
    pub modes: Vec<SpectrumMode>,
}

impl CircleSpectrum {
    pub fn min_quotient(&self) -> f64 {
        self.modes.iter().map(|m| m.quotient).fold(f64::INFINITY, f64::min)
    }

    pub fn is_coercive(&self) -> bool {
        self.min_quotient() > 0.0
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,quotient")?;
        for m in &self.modes {
            writeln!(out, "{},{:.16e}", m.k, m.quotient)?;
        }
        Ok(())
    }
}

/// Mode-by-mode spectrum: `(pi k^2 / R - pi R c) / (pi R + pi k^2 / R)`.
/// Sine modes give the same quotients by rotation, so only cosines are listed.
pub fn circle_spectrum(radius: f64, c: f64, k_max: usize) -> Result<CircleSpectrum> {
    if !(radius > 0.0) || !c.is_finite() {
        return Err(Error::InvalidInput(format!(
            "invalid circle spectrum input R={radius}, c={c}"
        )));
    }
    let modes = (0..=k_max)
        .map(|k| {
            let k2 = (k * k) as f64;
            SpectrumMode {
                k,
                quotient: (PI * k2 / radius - PI * radius * c) / (PI * radius + PI * k2 / radius),
            }
        })
        .collect();
    Ok(CircleSpectrum { radius, c, modes })
}

/// `(pi / L)^2`, the first Dirichlet eigenvalue of an arc of length `L`.
pub fn dirichlet_eigenvalue(length: f64) -> f64 {
    (PI / length).powi(2)
}

/// Connected arc from point `start` to point `end` following the curve
/// orientation; wraps through index 0 when `end < start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcSegment {
    pub start: usize,
    pub end: usize,
}

impl ArcSegment {
    fn indices(&self, m: usize) -> Result<Vec<usize>> {
        if self.start >= m || self.end >= m {
            return Err(Error::InvalidSegment(format!(
                "indices {}..{} outside a curve of {m} points",
                self.start, self.end
            )));
        }
        if self.start == self.end {
            return Err(Error::InvalidSegment("arc has zero length".into()));
        }
        let count = (self.end + m - self.start) % m + 1;
        Ok((0..count).map(|k| (self.start + k) % m).collect())
    }

    /// Arc length of the segment on `curve`.
    pub fn length(&self, curve: &CurveSample) -> Result<f64> {
        let idx = self.indices(curve.len())?;
        Ok(idx[..idx.len() - 1].iter().map(|&i| curve.arclength[i]).sum())
    }
}

/// When `c >= alpha >= (pi / L)^2` on the arc, returns the first Dirichlet
/// eigenfunction `sin(pi s / L)` of the arc, extended by zero. It makes `j2`
/// nonpositive, so the second variation is not coercive.
pub fn noncoercivity_witness(
    curve: &CurveSample,
    c_field: &FieldOnCurve,
    alpha: f64,
    segment: ArcSegment,
) -> Result<Option<FieldOnCurve>> {
    curve.check(c_field)?;
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    let idx = segment.indices(curve.len())?;
    if let Some(&i) = idx.iter().find(|&&i| c_field.values[i] < alpha) {
        return Err(Error::InvalidInput(format!(
            "c = {} < alpha = {alpha} at point {i} of the arc",
            c_field.values[i]
        )));
    }
    let length = segment.length(curve)?;
    // relative slack absorbs rounding in the summed arc length
    if alpha < dirichlet_eigenvalue(length) * (1.0 - 1e-12) {
        return Ok(None);
    }
    let mut values = vec![0.0; curve.len()];
    let mut s = 0.0;
    for (k, &i) in idx.iter().enumerate() {
        values[i] = (PI * s / length).sin();
        if k + 1 < idx.len() {
            s += curve.arclength[i];
        }
    }
    // endpoints are exact zeros
    values[idx[0]] = 0.0;
    values[*idx.last().expect("nonempty arc")] = 0.0;
    Ok(Some(FieldOnCurve { values }))
}
