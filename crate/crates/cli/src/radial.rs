//! Commands on radial pre-certificates: certify, sweep, profile, stability.

use clap::Args;
use serde::Serialize;
use tvcert::precert::SweepRow;
use tvcert::{
    certify_with_profile, circle_spectrum, solve_precert, sweep_sigma, CertificateReport, CertifyTolerances,
    GaussianKernel, SimpleRadialSpec, Verdict,
};

use crate::output::{num, write_csv, write_json, write_svg};
use crate::svg::{Plot, Series};
use crate::{CliError, Context};

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Radii `R_1 < ... < R_N`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub radii: Vec<f64>,
    /// Nonzero amplitudes, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub amps: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    /// Allowed |f_v(R_i) - sign(a_i)| (default 1e-6).
    #[arg(long)]
    pub tol_sat: Option<f64>,
    /// Stability margins must exceed this (default 1e-10).
    #[arg(long)]
    pub tol_stab: Option<f64>,
    /// Relative half-width of the windows excluded around each radius (default 0.02).
    #[arg(long)]
    pub exclusion: Option<f64>,
    /// Scan up to R_N + factor * sigma * sqrt(2) (default 6).
    #[arg(long)]
    pub r_max_factor: Option<f64>,
    /// Uniform scan points, at least 4000.
    #[arg(long)]
    pub scan_points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Kernel width.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[command(flatten)]
    pub tols: TolArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Kernel widths, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Vec<f64>,
    /// Range form `--sigma-min a --sigma-max b --sigma-step d`, used without `--sigmas`.
    #[arg(long)]
    pub sigma_min: Option<f64>,
    #[arg(long)]
    pub sigma_max: Option<f64>,
    #[arg(long)]
    pub sigma_step: Option<f64>,
    #[command(flatten)]
    pub tols: TolArgs,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Largest radius (default R_N + 6 sigma sqrt(2)).
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Number of samples (default 2001).
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Single circle mode: radius, used together with `--c`.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Single circle mode: constant potential `H^2 + d xi / d nu`.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Highest Fourier mode (default 10).
    #[arg(long)]
    pub k_max: Option<usize>,
}

const SPEC_KEYS: [&str; 2] = ["radii", "amps"];
const TOL_KEYS: [&str; 5] = ["tol-sat", "tol-stab", "exclusion", "r-max-factor", "scan-points"];
pub const CERTIFY_KEYS: &[&str] = &[
    "radii",
    "amps",
    "sigma",
    "tol-sat",
    "tol-stab",
    "exclusion",
    "r-max-factor",
    "scan-points",
];
pub const SWEEP_KEYS: &[&str] = &[
    "radii",
    "amps",
    "sigmas",
    "sigma-min",
    "sigma-max",
    "sigma-step",
    "tol-sat",
    "tol-stab",
    "exclusion",
    "r-max-factor",
    "scan-points",
];
pub const PROFILE_KEYS: &[&str] = &["radii", "amps", "sigma", "r-max", "points"];
pub const STABILITY_KEYS: &[&str] = &["radii", "amps", "sigma", "radius", "c", "k-max"];

pub fn spec_from(ctx: &Context, a: &SpecArgs) -> Result<SimpleRadialSpec, CliError> {
    let radii = ctx.config.list(SPEC_KEYS[0], &a.radii)?.unwrap_or_default();
    let amps = ctx.config.list(SPEC_KEYS[1], &a.amps)?.unwrap_or_default();
    SimpleRadialSpec::new(radii, amps).map_err(|e| CliError::Config(e.to_string()))
}

fn tolerances(ctx: &Context, a: &TolArgs) -> Result<CertifyTolerances, CliError> {
    let d = CertifyTolerances::default();
    let c = &ctx.config;
    let tols = CertifyTolerances {
        tol_sat: c.get_or(TOL_KEYS[0], a.tol_sat, d.tol_sat)?,
        tol_stab: c.get_or(TOL_KEYS[1], a.tol_stab, d.tol_stab)?,
        exclusion: c.get_or(TOL_KEYS[2], a.exclusion, d.exclusion)?,
        r_max_factor: c.get_or(TOL_KEYS[3], a.r_max_factor, d.r_max_factor)?,
        scan_points: c.get_or(TOL_KEYS[4], a.scan_points, d.scan_points)?,
        ..d
    };
    let positive = [tols.tol_sat, tols.exclusion, tols.r_max_factor];
    if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) || !(tols.tol_stab >= 0.0) {
        return Err(CliError::Config("tolerances must be positive".into()));
    }
    if tols.exclusion >= 0.5 {
        return Err(CliError::Config("exclusion must be below 0.5".into()));
    }
    Ok(tols)
}

/// Converts a width parameter to a standard deviation.
pub fn std_sigma(ctx: &Context, value: f64) -> Result<f64, CliError> {
    GaussianKernel::from_parameter(value, ctx.convention)
        .map(|k| k.sigma())
        .map_err(|e| CliError::Config(e.to_string()))
}

fn fv_plot<'a>(report: &CertificateReport, r: &'a [f64], fv: &'a [f64], title: &'a str) -> Plot<'a> {
    Plot {
        title,
        x_label: "r",
        y_label: "f_v(r)",
        series: vec![Series {
            label: "f_v",
            x: r,
            y: fv,
        }],
        guides: vec![1.0, -1.0],
        markers: report.radii.clone(),
        ..Default::default()
    }
}

pub fn certify(ctx: &Context, a: &CertifyArgs) -> Result<(), CliError> {
    let spec = spec_from(ctx, &a.spec)?;
    let sigma = std_sigma(ctx, ctx.config.require("sigma", a.sigma)?)?;
    let tols = tolerances(ctx, &a.tols)?;
    let (report, profile) = certify_with_profile(&spec, sigma, &tols)?;
    write_json(&ctx.out.join("certify_report.json"), &report)?;
    profile.save_csv(&ctx.out.join("fv_profile.csv"))?;
    let title = format!("f_v, sigma = {sigma}, verdict {}", report.verdict);
    write_svg(
        ctx,
        "fv_plot.svg",
        fv_plot(&report, profile.grid(), profile.values(), &title),
    )?;
    println!(
        "verdict: {} (feasibility margin {:.6e}, stability margins {:?})",
        report.verdict, report.feasibility_margin, report.stability_margins
    );
    match report.verdict {
        Verdict::Nondegenerate => Ok(()),
        v => Err(CliError::Verdict(format!("verdict {v}"))),
    }
}

fn sigma_list(ctx: &Context, a: &SweepArgs) -> Result<Vec<f64>, CliError> {
    let c = &ctx.config;
    if let Some(list) = c.list("sigmas", &a.sigmas)? {
        if list.is_empty() {
            return Err(CliError::Config("empty sigma list".into()));
        }
        return Ok(list);
    }
    let lo: f64 = c.require("sigma-min", a.sigma_min)?;
    let hi: f64 = c.require("sigma-max", a.sigma_max)?;
    let step: f64 = c.require("sigma-step", a.sigma_step)?;
    if !(step > 0.0 && hi >= lo) {
        return Err(CliError::Config(
            "need sigma-step > 0 and sigma-max >= sigma-min".into(),
        ));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    // round to the step's decimal grid so that 0.1 + 13 * 0.05 prints as 0.75
    Ok((0..count)
        .map(|k| ((lo + step * k as f64) * 1e12).round() / 1e12)
        .collect())
}

pub fn sweep(ctx: &Context, a: &SweepArgs) -> Result<(), CliError> {
    let spec = spec_from(ctx, &a.spec)?;
    let tols = tolerances(ctx, &a.tols)?;
    let params = sigma_list(ctx, a)?;
    let sigmas = params
        .iter()
        .map(|&p| std_sigma(ctx, p))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = sweep_sigma(&spec, &sigmas, &tols)?;
    let n = spec.len();

    let mut header = vec![
        "parameter".to_string(),
        "sigma".into(),
        "verdict".into(),
        "feasibility_margin".into(),
    ];
    header.extend((1..=n).map(|i| format!("stability_margin_{i}")));
    header.extend((1..=n).map(|i| format!("fv_second_{i}")));
    header.push("error".into());
    let lines = rows.iter().zip(&params).map(|(row, p)| sweep_line(row, *p, n));
    write_csv(&ctx.out.join("sweep.csv"), &header.join(","), lines)?;

    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.report.is_ok()).collect();
    let xs: Vec<f64> = ok.iter().map(|r| r.sigma).collect();
    let ys: Vec<f64> = ok
        .iter()
        .map(|r| r.report.as_ref().map_or(f64::NAN, |rep| rep.fv_second_closed_form[0]))
        .collect();
    write_svg(
        ctx,
        "sweep_fv2.svg",
        Plot {
            title: "f_v''(R_1) against sigma",
            x_label: "sigma",
            y_label: "f_v''(R_1)",
            series: vec![Series {
                label: "f_v''(R_1)",
                x: &xs,
                y: &ys,
            }],
            guides: vec![0.0],
            points: true,
            ..Default::default()
        },
    )?;

    let failed = rows
        .iter()
        .filter(|r| !matches!(&r.report, Ok(rep) if rep.verdict == Verdict::Nondegenerate))
        .count();
    println!("{} of {} sigma values nondegenerate", rows.len() - failed, rows.len());
    if failed > 0 {
        return Err(CliError::Verdict(format!("{failed} sigma value(s) not nondegenerate")));
    }
    Ok(())
}

fn sweep_line(row: &SweepRow, param: f64, n: usize) -> String {
    let mut fields = vec![num(param), num(row.sigma)];
    match &row.report {
        Ok(rep) => {
            fields.push(rep.verdict.to_string());
            fields.push(num(rep.feasibility_margin));
            fields.extend(rep.stability_margins.iter().map(|&v| num(v)));
            fields.extend(rep.fv_second_closed_form.iter().map(|&v| num(v)));
            fields.push(String::new());
        }
        Err(e) => {
            fields.push("error".into());
            fields.extend(std::iter::repeat_n(String::new(), 1 + 2 * n));
            fields.push(format!("\"{}\"", e.replace('"', "'")));
        }
    }
    fields.join(",")
}

pub fn profile(ctx: &Context, a: &ProfileArgs) -> Result<(), CliError> {
    let spec = spec_from(ctx, &a.spec)?;
    let sigma = std_sigma(ctx, ctx.config.require("sigma", a.sigma)?)?;
    let pc = solve_precert(&spec, sigma)?;
    let r_max = ctx
        .config
        .get_or("r-max", a.r_max, spec.outer_radius() + 6.0 * pc.tau())?;
    let points: usize = ctx.config.get_or("points", a.points, 2001)?;
    if !(r_max > 0.0) || points < 2 {
        return Err(CliError::Config("need r-max > 0 and at least 2 points".into()));
    }
    let grid: Vec<f64> = (0..points).map(|k| r_max * k as f64 / (points - 1) as f64).collect();
    let eta = pc.eta_profile(&grid)?;
    let fv = pc.eval_fv(&grid)?;
    eta.save_csv(&ctx.out.join("eta_profile.csv"))?;
    fv.save_csv(&ctx.out.join("fv_profile.csv"))?;
    write_svg(
        ctx,
        "profile.svg",
        Plot {
            title: "eta_v and f_v",
            x_label: "r",
            y_label: "value",
            series: vec![
                Series {
                    label: "eta_v",
                    x: &grid,
                    y: eta.values(),
                },
                Series {
                    label: "f_v",
                    x: &grid,
                    y: fv.values(),
                },
            ],
            guides: vec![1.0, -1.0],
            markers: spec.radii().to_vec(),
            ..Default::default()
        },
    )?;
    println!("wrote {points} samples on [0, {r_max}]");
    Ok(())
}

#[derive(Serialize)]
struct CircleSummary {
    radius: f64,
    c: f64,
    min_quotient: f64,
    coercive: bool,
}

pub fn stability(ctx: &Context, a: &StabilityArgs) -> Result<(), CliError> {
    let c = &ctx.config;
    let k_max: usize = c.get_or("k-max", a.k_max, 10)?;
    let circles: Vec<(f64, f64)> = match (c.get::<f64>("radius", a.radius)?, c.get::<f64>("c", a.c)?) {
        (Some(r), Some(v)) => vec![(r, v)],
        (None, None) => {
            let spec = spec_from(ctx, &a.spec)?;
            let sigma = std_sigma(ctx, c.require("sigma", a.sigma)?)?;
            let pc = solve_precert(&spec, sigma)?;
            // potential of PC(sign(a_i) eta_v) on the i-th circle
            spec.radii()
                .iter()
                .enumerate()
                .map(|(i, &r)| (r, 1.0 / (r * r) + spec.sign(i) * pc.eta_dr(r)))
                .collect()
        }
        _ => return Err(CliError::Config("--radius and --c must be given together".into())),
    };
    let spectra = circles
        .iter()
        .map(|&(r, v)| circle_spectrum(r, v, k_max))
        .collect::<Result<Vec<_>, _>>()?;

    let mut lines = Vec::new();
    for (i, s) in spectra.iter().enumerate() {
        for m in &s.modes {
            lines.push(format!(
                "{},{},{},{},{}",
                i + 1,
                num(s.radius),
                num(s.c),
                m.k,
                num(m.quotient)
            ));
        }
    }
    write_csv(&ctx.out.join("stability.csv"), "circle,radius,c,k,quotient", lines)?;
    let summary: Vec<CircleSummary> = spectra
        .iter()
        .map(|s| CircleSummary {
            radius: s.radius,
            c: s.c,
            min_quotient: s.min_quotient(),
            coercive: s.is_coercive(),
        })
        .collect();
    write_json(&ctx.out.join("stability.json"), &summary)?;

    let ks: Vec<Vec<f64>> = spectra
        .iter()
        .map(|s| s.modes.iter().map(|m| m.k as f64).collect())
        .collect();
    let qs: Vec<Vec<f64>> = spectra
        .iter()
        .map(|s| s.modes.iter().map(|m| m.quotient).collect())
        .collect();
    let labels: Vec<String> = spectra.iter().map(|s| format!("R = {}", s.radius)).collect();
    write_svg(
        ctx,
        "stability.svg",
        Plot {
            title: "Rayleigh quotients of cos(k theta)",
            x_label: "k",
            y_label: "quotient",
            series: (0..spectra.len())
                .map(|i| Series {
                    label: &labels[i],
                    x: &ks[i],
                    y: &qs[i],
                })
                .collect(),
            guides: vec![0.0],
            points: true,
            ..Default::default()
        },
    )?;

    let bad = summary.iter().filter(|s| !s.coercive).count();
    for s in &summary {
        println!(
            "R = {}: c = {:.6e}, min quotient {:.6e}, coercive {}",
            s.radius, s.c, s.min_quotient, s.coercive
        );
    }
    if bad > 0 {
        return Err(CliError::Verdict(format!("{bad} circle(s) not coercive")));
    }
    Ok(())
}
