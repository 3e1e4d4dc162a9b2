use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certificate::{solve_precert, Precertificate};
use super::SimpleRadialSpec;
use crate::error::{Error, Result};
use crate::kernels::{RadialProfile, KERNEL_TOL};
use crate::quadrature::integrate_panels;

/// A local maximum whose second difference exceeds this is not resolved.
pub const MAX_PEAK_SECOND_DIFFERENCE: f64 = 1e-2;

/// Relative tolerance for agreement of the numeric and closed-form `f_v''`.
pub const SECOND_DERIVATIVE_AGREEMENT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyTolerances {
    /// Allowed `|f_v(R_i) - sign(a_i)|`.
    pub tol_sat: f64,
    /// Stability margins must exceed this.
    pub tol_stab: f64,
    /// Half-width of the excluded window around `R_i`, relative to `R_i`.
    pub exclusion: f64,
    /// The scan stops at `R_N + r_max_factor * sigma * sqrt(2)`.
    pub r_max_factor: f64,
    /// Uniform points on the scan interval (at least 4000 are used).
    pub scan_points: usize,
    /// Extra uniform points on `[R_i - 5w, R_i + 5w]` for each radius.
    pub refine_points: usize,
}

impl Default for CertifyTolerances {
    fn default() -> Self {
        Self {
            tol_sat: 1e-6,
            tol_stab: 1e-10,
            exclusion: 0.02,
            r_max_factor: 6.0,
            scan_points: 4000,
            refine_points: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Nondegenerate,
    FeasibleButUnstable,
    Infeasible,
    SaturationFailed,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Nondegenerate => "nondegenerate",
            Verdict::FeasibleButUnstable => "feasible_but_unstable",
            Verdict::Infeasible => "infeasible",
            Verdict::SaturationFailed => "saturation_failed",
        }
    }

    /// The pre-certificate is a valid dual certificate, hence the
    /// minimal-norm one.
    pub fn is_dual_feasible(&self) -> bool {
        matches!(self, Verdict::Nondegenerate | Verdict::FeasibleButUnstable)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateReport {
    pub radii: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub sigma: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gram_condition: f64,
    pub constraint_residual: f64,
    /// `|f_v(R_i) - sign(a_i)|`.
    pub saturation_residuals: Vec<f64>,
    /// `|eta_v(R_i) - sign(a_i) / R_i|`.
    pub curvature_residuals: Vec<f64>,
    /// `|f_v'(R_i)|`.
    pub derivative_residuals: Vec<f64>,
    /// `1 - sup |f_v|` outside the exclusion windows, tail included.
    pub feasibility_margin: f64,
    pub sup_outside: f64,
    pub sup_location: f64,
    /// `max |f_v|` inside each exclusion window.
    pub window_maxima: Vec<f64>,
    pub tail_bound: f64,
    pub scan_end: f64,
    pub scan_points: usize,
    /// `-(1/R_i^2 + sign(a_i) eta_v'(R_i))`; positive means strictly stable.
    pub stability_margins: Vec<f64>,
    pub fv_second_numeric: Vec<f64>,
    pub fv_second_closed_form: Vec<f64>,
    pub second_derivative_consistent: bool,
    pub verdict: Verdict,
    /// True when the pre-certificate is dual feasible and therefore equals
    /// the minimal-norm certificate; otherwise that identification is void.
    pub minimal_norm_certificate: bool,
    pub tolerances: CertifyTolerances,
}

impl CertificateReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }
}

/// Full check of the non-degenerate source condition for a radial spec.
pub fn certify(spec: &SimpleRadialSpec, sigma: f64, tols: &CertifyTolerances) -> Result<CertificateReport> {
    let pc = solve_precert(spec, sigma)?;
    certify_precert(&pc, tols).map(|(report, _)| report)
}

/// Same as [`certify`] but also returns the scanned `f_v` profile.
pub fn certify_with_profile(
    spec: &SimpleRadialSpec,
    sigma: f64,
    tols: &CertifyTolerances,
) -> Result<(CertificateReport, RadialProfile)> {
    let pc = solve_precert(spec, sigma)?;
    certify_precert(&pc, tols)
}

/// Scan grid: uniform base, refined blocks around each radius, exact window
/// edges and the radii themselves.
pub fn scan_grid(spec: &SimpleRadialSpec, sigma: f64, tols: &CertifyTolerances) -> Vec<f64> {
    let tau = sigma * std::f64::consts::SQRT_2;
    let end = spec.outer_radius() + tols.r_max_factor * tau;
    let n = tols.scan_points.max(4000);
    let mut grid: Vec<f64> = (0..n).map(|k| end * k as f64 / (n - 1) as f64).collect();
    for &radius in spec.radii() {
        let w = tols.exclusion * radius;
        grid.extend([radius, radius - w, radius + w]);
        if tols.refine_points > 1 {
            let lo = (radius - 5.0 * w).max(0.0);
            let hi = (radius + 5.0 * w).min(end);
            let m = tols.refine_points;
            grid.extend((0..m).map(|k| lo + (hi - lo) * k as f64 / (m - 1) as f64));
        }
    }
    grid.retain(|r| (0.0..=end).contains(r));
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * b.abs().max(1.0));
    grid
}

pub(crate) fn certify_precert(
    pc: &Precertificate,
    tols: &CertifyTolerances,
) -> Result<(CertificateReport, RadialProfile)> {
    let spec = pc.spec();
    let n = spec.len();
    let tau = pc.tau();
    let grid = scan_grid(spec, pc.sigma(), tols);
    let end = *grid.last().expect("nonempty grid");
    let moments = pc.cumulative_moments(&grid);
    let fv: Vec<f64> = grid
        .iter()
        .zip(&moments)
        .map(|(&r, &m)| if r > 0.0 { m / r } else { 0.0 })
        .collect();

    let windows: Vec<(f64, f64)> = spec
        .radii()
        .iter()
        .map(|&r| (r, tols.exclusion * r * (1.0 - 1e-12)))
        .collect();
    let window_of = |r: f64| windows.iter().position(|&(c, w)| (r - c).abs() < w);

    let mut window_maxima = vec![0.0f64; n];
    let mut sup_outside = 0.0f64;
    let mut sup_location = 0.0;
    for (k, (&r, &f)) in grid.iter().zip(&fv).enumerate() {
        match window_of(r) {
            Some(i) => window_maxima[i] = window_maxima[i].max(f.abs()),
            None => {
                if f.abs() > sup_outside {
                    sup_outside = f.abs();
                    sup_location = r;
                }
                let interior = k > 0 && k + 1 < grid.len();
                if !interior || window_of(grid[k - 1]).is_some() || window_of(grid[k + 1]).is_some() {
                    continue;
                }
                let (a, b) = (fv[k - 1].abs(), fv[k + 1].abs());
                if f.abs() >= a && f.abs() >= b && f.abs() > 0.0 {
                    let second = a - 2.0 * f.abs() + b;
                    if second.abs() > MAX_PEAK_SECOND_DIFFERENCE {
                        return Err(Error::GridTooCoarse {
                            radius: r,
                            second_difference: second,
                        });
                    }
                    let (peak_r, peak) = refine_peak(pc, grid[k - 1], grid[k + 1], moments[k - 1]);
                    if peak > sup_outside {
                        sup_outside = peak;
                        sup_location = peak_r;
                    }
                }
            }
        }
    }

    // Beyond the scan: |F(r)| <= |F(end)| + int_end^inf |eta| s ds.
    let remainder = integrate_panels(&|s: f64| pc.eta(s).abs() * s, end, end + 12.0 * tau, tau, KERNEL_TOL);
    let tail_bound = (moments.last().expect("nonempty").abs() + remainder) / end;
    if tail_bound > sup_outside {
        sup_outside = tail_bound;
        sup_location = end;
    }
    let feasibility_margin = 1.0 - sup_outside;

    let index_of = |radius: f64| {
        grid.iter()
            .position(|&r| (r - radius).abs() <= 1e-13 * radius.max(1.0))
            .expect("radii are inserted into the scan grid")
    };
    let mut saturation_residuals = Vec::with_capacity(n);
    let mut curvature_residuals = Vec::with_capacity(n);
    let mut derivative_residuals = Vec::with_capacity(n);
    let mut stability_margins = Vec::with_capacity(n);
    let mut fv_second_numeric = Vec::with_capacity(n);
    let mut fv_second_closed_form = Vec::with_capacity(n);
    for (i, &radius) in spec.radii().iter().enumerate() {
        let sign = spec.sign(i);
        let k = index_of(radius);
        let eta = pc.eta(radius);
        saturation_residuals.push((fv[k] - sign).abs());
        curvature_residuals.push((eta - sign / radius).abs());
        derivative_residuals.push((eta - moments[k] / (radius * radius)).abs());
        stability_margins.push(-(1.0 / (radius * radius) + sign * pc.eta_dr(radius)));
        fv_second_numeric.push(pc.fv_second_numeric(radius));
        fv_second_closed_form.push(pc.fv_second_closed_form(i));
    }
    let second_derivative_consistent = fv_second_numeric
        .iter()
        .zip(&fv_second_closed_form)
        .all(|(a, b)| (a - b).abs() <= SECOND_DERIVATIVE_AGREEMENT * b.abs().max(1.0));
    if !second_derivative_consistent {
        log::warn!("numeric and closed-form f_v'' disagree: {fv_second_numeric:?} vs {fv_second_closed_form:?}");
    }

    let verdict = if saturation_residuals.iter().any(|&s| !(s <= tols.tol_sat)) {
        Verdict::SaturationFailed
    } else if !(feasibility_margin > 0.0) || window_maxima.iter().any(|&m| m > 1.0 + tols.tol_sat) {
        Verdict::Infeasible
    } else if stability_margins.iter().any(|&m| !(m > tols.tol_stab)) {
        Verdict::FeasibleButUnstable
    } else {
        Verdict::Nondegenerate
    };

    let report = CertificateReport {
        radii: spec.radii().to_vec(),
        amplitudes: spec.amplitudes().to_vec(),
        sigma: pc.sigma(),
        alpha: pc.alpha().to_vec(),
        beta: pc.beta().to_vec(),
        gram_condition: pc.condition(),
        constraint_residual: pc.constraint_residual(),
        saturation_residuals,
        curvature_residuals,
        derivative_residuals,
        feasibility_margin,
        sup_outside,
        sup_location,
        window_maxima,
        tail_bound,
        scan_end: end,
        scan_points: grid.len(),
        stability_margins,
        fv_second_numeric,
        fv_second_closed_form,
        second_derivative_consistent,
        minimal_norm_certificate: verdict.is_dual_feasible(),
        verdict,
        tolerances: *tols,
    };
    let profile = RadialProfile::new(grid, fv, "f_v")?;
    Ok((report, profile))
}

// Golden-section search for the maximum of |f_v| on [a, b], where
// `moment_a` is F(a).
fn refine_peak(pc: &Precertificate, a: f64, b: f64, moment_a: f64) -> (f64, f64) {
    let value = |r: f64| ((moment_a + pc.moment_between(a, r)) / r).abs();
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = value(x1);
    let mut f2 = value(x2);
    for _ in 0..60 {
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = value(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = value(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// One row of a sigma sweep; failures are recorded, not propagated.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub report: std::result::Result<CertificateReport, String>,
}

/// Independent certification at each sigma (rows run on the rayon pool).
pub fn sweep_sigma(spec: &SimpleRadialSpec, sigmas: &[f64], tols: &CertifyTolerances) -> Result<Vec<SweepRow>> {
    if sigmas.is_empty() {
        return Err(Error::InvalidInput("sigma list is empty".into()));
    }
    Ok(sigmas
        .par_iter()
        .map(|&sigma| SweepRow {
            sigma,
            report: certify(spec, sigma, tols).map_err(|e| e.to_string()),
        })
        .collect())
}
