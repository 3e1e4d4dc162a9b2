//! Grid commands: TV reconstruction experiments and the discrete dual norm.

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use tvcert::tvgrid::{add_gaussian_noise, lambda_max, GnormParams, GnormResult, Subsampling};
use tvcert::{
    certify, discrete_gnorm, level_structure, make_phantom, solve_precert, solve_tv, CertifyTolerances,
    ForwardBlurSubsample, GridImage, LevelStructure, PhantomKind, SolveParams, SolveResult,
};

use crate::output::write_json;
use crate::radial::{std_sigma, SpecArgs};
use crate::{CliError, Context};

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// `disk`, `annulus` or `three-shapes`.
    #[arg(long)]
    pub phantom: Option<String>,
    /// Disk radius (length units).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Annulus radii.
    #[arg(long)]
    pub inner: Option<f64>,
    #[arg(long)]
    pub outer: Option<f64>,
    /// Observation grid (default 50 x 50).
    #[arg(long)]
    pub obs_rows: Option<usize>,
    #[arg(long)]
    pub obs_cols: Option<usize>,
    /// Subsampling stride between the fine and observation grids (default 5).
    #[arg(long)]
    pub factor: Option<usize>,
    /// Blur width in length units (default 2).
    #[arg(long)]
    pub sigma_blur: Option<f64>,
    /// Fine pixel size (default 1).
    #[arg(long)]
    pub pixel_size: Option<f64>,
    /// `point` (default) or `average`.
    #[arg(long)]
    pub subsampling: Option<String>,
    /// Regularization weight.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Regularization weight as a multiple of the measured lambda_max.
    #[arg(long)]
    pub lambda_rel: Option<f64>,
    /// Noise standard deviation per observation pixel (default 0).
    #[arg(long)]
    pub noise: Option<f64>,
    /// Noise seeds, comma separated (default 0); runs fan out over `--jobs`.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Normalized duality gap target (default 1e-6).
    #[arg(long)]
    pub gap_tol: Option<f64>,
    /// Level-set threshold as a fraction of max |u| (default 0.5).
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GnormArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Grid size (default 300 x 300).
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    /// Half-width of the square domain centered at the origin (default 3).
    #[arg(long)]
    pub extent: Option<f64>,
    /// Multiplies the rasterized field (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub scale: Option<f64>,
    /// Relative gap between the returned bounds (default 1e-2).
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// The field is declared dual feasible when the value is at most 1 + tol (default 0.02).
    #[arg(long)]
    pub feasibility_tol: Option<f64>,
}

pub const RECONSTRUCT_KEYS: &[&str] = &[
    "phantom",
    "radius",
    "inner",
    "outer",
    "obs-rows",
    "obs-cols",
    "factor",
    "sigma-blur",
    "pixel-size",
    "subsampling",
    "lambda",
    "lambda-rel",
    "noise",
    "seeds",
    "max-iter",
    "gap-tol",
    "threshold",
];
pub const GNORM_KEYS: &[&str] = &[
    "radii",
    "amps",
    "sigma",
    "rows",
    "cols",
    "extent",
    "scale",
    "rel-tol",
    "max-iter",
    "feasibility-tol",
];

#[derive(Serialize)]
struct RunSummary {
    seed: u64,
    lambda: f64,
    lambda_max: Option<f64>,
    converged: bool,
    iterations: usize,
    primal_value: f64,
    dual_value: f64,
    normalized_gap: f64,
    component_count: usize,
    signs: Vec<i8>,
    files: Vec<String>,
}

#[derive(Serialize)]
struct ReconstructReport {
    phantom: PhantomKind,
    fine_dims: (usize, usize),
    obs_dims: (usize, usize),
    pixel_size: f64,
    sigma_blur: f64,
    factor: usize,
    noise: f64,
    threshold: f64,
    runs: Vec<RunSummary>,
}

fn phantom(ctx: &Context, a: &ReconstructArgs) -> Result<PhantomKind, CliError> {
    let c = &ctx.config;
    let name: String = c.get_or("phantom", a.phantom.clone(), "disk".into())?;
    match name.replace('_', "-").as_str() {
        "disk" => Ok(PhantomKind::Disk {
            radius: c.require("radius", a.radius)?,
        }),
        "annulus" => Ok(PhantomKind::Annulus {
            inner: c.require("inner", a.inner)?,
            outer: c.require("outer", a.outer)?,
        }),
        "three-shapes" => Ok(PhantomKind::ThreeShapes),
        other => Err(CliError::Config(format!("unknown phantom `{other}`"))),
    }
}

fn config_err(e: tvcert::Error) -> CliError {
    CliError::Config(e.to_string())
}

pub fn reconstruct(ctx: &Context, a: &ReconstructArgs) -> Result<(), CliError> {
    let c = &ctx.config;
    let kind = phantom(ctx, a)?;
    let obs_rows: usize = c.get_or("obs-rows", a.obs_rows, 50)?;
    let obs_cols: usize = c.get_or("obs-cols", a.obs_cols, 50)?;
    let factor: usize = c.get_or("factor", a.factor, 5)?;
    let sigma_blur = std_sigma(ctx, c.get_or("sigma-blur", a.sigma_blur, 2.0)?)?;
    let h: f64 = c.get_or("pixel-size", a.pixel_size, 1.0)?;
    let mode = match c.get_or("subsampling", a.subsampling.clone(), "point".into())?.as_str() {
        "point" => Subsampling::Point,
        "average" => Subsampling::Average,
        other => return Err(CliError::Config(format!("unknown subsampling `{other}`"))),
    };
    let lambda: Option<f64> = c.get("lambda", a.lambda)?;
    let lambda_rel: Option<f64> = c.get("lambda-rel", a.lambda_rel)?;
    if lambda.is_some() == lambda_rel.is_some() {
        return Err(CliError::Config("give exactly one of --lambda and --lambda-rel".into()));
    }
    let noise: f64 = c.get_or("noise", a.noise, 0.0)?;
    let seeds = c.list("seeds", &a.seeds)?.unwrap_or_else(|| vec![0]);
    let defaults = SolveParams::default();
    let params = SolveParams {
        max_iter: c.get_or("max-iter", a.max_iter, defaults.max_iter)?,
        gap_tol: c.get_or("gap-tol", a.gap_tol, defaults.gap_tol)?,
        ..defaults
    };
    let threshold: f64 = c.get_or("threshold", a.threshold, 0.5)?;
    if !(noise >= 0.0) || !(threshold > 0.0 && threshold <= 1.0) || seeds.is_empty() {
        return Err(CliError::Config(
            "need noise >= 0, 0 < threshold <= 1 and at least one seed".into(),
        ));
    }
    if lambda_rel.is_some_and(|r| !(r > 0.0)) {
        return Err(CliError::Config("lambda-rel must be positive".into()));
    }

    let op = ForwardBlurSubsample::new(sigma_blur, factor, obs_rows, obs_cols, h, mode).map_err(config_err)?;
    let (rows, cols) = op.fine_dims();
    let u0 = make_phantom(kind, rows, cols, h).map_err(config_err)?;
    u0.save(&ctx.out.join("u0.grid"))?;
    let clean = op.forward(&u0)?;

    let multi = seeds.len() > 1;
    let runs: Vec<Result<(RunSummary, bool), CliError>> = seeds
        .par_iter()
        .map(|&seed| {
            let y = if noise > 0.0 {
                add_gaussian_noise(&clean, noise, seed)?
            } else {
                clean.clone()
            };
            let (lam, lmax) = match (lambda, lambda_rel) {
                (Some(l), _) => (l, None),
                (None, Some(r)) => {
                    let lmax = lambda_max(&op, &y, &GnormParams::default())?;
                    (r * lmax, Some(lmax))
                }
                _ => unreachable!("validated above"),
            };
            let (result, converged) = match solve_tv(&op, &y, lam, &params) {
                Ok(r) => (r, true),
                Err(tvcert::Error::NotConverged { last: Some(r), .. }) => (*r, false),
                Err(e) => return Err(e.into()),
            };
            let suffix = if multi { format!("_seed{seed}") } else { String::new() };
            let ls = level_structure(&result.u, threshold);
            let files = write_run(ctx, &suffix, &y, &result, &ls)?;
            Ok((
                RunSummary {
                    seed,
                    lambda: lam,
                    lambda_max: lmax,
                    converged,
                    iterations: result.iterations,
                    primal_value: result.primal_value,
                    dual_value: result.dual_value,
                    normalized_gap: result.normalized_gap(),
                    component_count: ls.component_count,
                    signs: ls.signs(),
                    files,
                },
                converged,
            ))
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
    let all_converged = runs.iter().all(|(_, ok)| *ok);
    let report = ReconstructReport {
        phantom: kind,
        fine_dims: (rows, cols),
        obs_dims: (obs_rows, obs_cols),
        pixel_size: h,
        sigma_blur,
        factor,
        noise,
        threshold,
        runs: runs.into_iter().map(|(s, _)| s).collect(),
    };
    write_json(&ctx.out.join("reconstruct_report.json"), &report)?;
    for r in &report.runs {
        println!(
            "seed {}: lambda {:.6e}, {} iterations, gap {:.3e}, {} component(s) {:?}{}",
            r.seed,
            r.lambda,
            r.iterations,
            r.normalized_gap,
            r.component_count,
            r.signs,
            if r.converged { "" } else { " (not converged)" }
        );
    }
    if !all_converged {
        return Err(CliError::Core(tvcert::Error::NotConverged {
            gap: report.runs.iter().map(|r| r.normalized_gap).fold(0.0, f64::max),
            iterations: params.max_iter,
            last: None,
        }));
    }
    Ok(())
}

fn write_run(
    ctx: &Context,
    suffix: &str,
    y: &GridImage,
    result: &SolveResult,
    ls: &LevelStructure,
) -> Result<Vec<String>, CliError> {
    let names = [
        format!("y{suffix}.grid"),
        format!("u{suffix}.grid"),
        format!("structure{suffix}.json"),
        format!("structure{suffix}.csv"),
    ];
    y.save(&ctx.out.join(&names[0]))?;
    result.u.save(&ctx.out.join(&names[1]))?;
    write_json(&ctx.out.join(&names[2]), ls)?;
    ls.save_csv(&ctx.out.join(&names[3]))?;
    Ok(names.to_vec())
}

#[derive(Serialize)]
struct GnormReport {
    value: f64,
    lower: f64,
    iterations: usize,
    rows: usize,
    cols: usize,
    pixel_size: f64,
    scale: f64,
    sigma: f64,
    /// `max |f_v|` over all radii, exclusion windows included.
    sup_fv: f64,
    feasibility_tol: f64,
    dual_feasible: bool,
}

pub fn gnorm(ctx: &Context, a: &GnormArgs) -> Result<(), CliError> {
    let c = &ctx.config;
    let spec = crate::radial::spec_from(ctx, &a.spec)?;
    let sigma = std_sigma(ctx, c.require("sigma", a.sigma)?)?;
    let rows: usize = c.get_or("rows", a.rows, 300)?;
    let cols: usize = c.get_or("cols", a.cols, rows)?;
    let extent: f64 = c.get_or("extent", a.extent, 3.0)?;
    let scale: f64 = c.get_or("scale", a.scale, 1.0)?;
    let tol: f64 = c.get_or("feasibility-tol", a.feasibility_tol, 0.02)?;
    let defaults = GnormParams::default();
    let params = GnormParams {
        rel_tol: c.get_or("rel-tol", a.rel_tol, defaults.rel_tol)?,
        max_iter: c.get_or("max-iter", a.max_iter, defaults.max_iter)?,
        ..defaults
    };
    if !(extent > 0.0) || !scale.is_finite() || !(tol >= 0.0) {
        return Err(CliError::Config("need extent > 0, finite scale and tol >= 0".into()));
    }
    let pixel_size = 2.0 * extent / rows.max(cols) as f64;
    let pc = solve_precert(&spec, sigma)?;
    let eta = pc.eta_image(rows, cols, pixel_size).map_err(config_err)?.scaled(scale);
    eta.save(&ctx.out.join("eta.grid"))?;
    let report = certify(&spec, sigma, &CertifyTolerances::default())?;
    let sup_fv = report.window_maxima.iter().fold(report.sup_outside, |m, v| m.max(*v));
    let GnormResult {
        value,
        lower,
        iterations,
    } = discrete_gnorm(&eta, &params)?;
    let out = GnormReport {
        value,
        lower,
        iterations,
        rows,
        cols,
        pixel_size,
        scale,
        sigma,
        sup_fv,
        feasibility_tol: tol,
        dual_feasible: value <= 1.0 + tol,
    };
    write_json(&ctx.out.join("gnorm.json"), &out)?;
    println!(
        "discrete dual norm {value:.6} (lower bound {lower:.6}), sup |f_v| {sup_fv:.6}, dual feasible: {}",
        out.dual_feasible
    );
    if !out.dual_feasible {
        return Err(CliError::Verdict(format!("dual norm {value:.6} exceeds 1 + {tol}")));
    }
    Ok(())
}
