//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::f64::consts::{PI, SQRT_2};
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tvcert::kernels::{circle_conv, disk_conv};
use tvcert::stability::*;
use tvcert::tvgrid::*;
use tvcert::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn spec(radii: &[f64], amps: &[f64]) -> SimpleRadialSpec {
    SimpleRadialSpec::new(radii.to_vec(), amps.to_vec()).unwrap()
}

fn kernel_oracles() -> Outcome {
    let rule = gauss_legendre(20);
    let mut worst = 0.0f64;
    for sigma in [0.1, 0.2, 0.5] {
        for radius in [0.5, 1.0, 1.5] {
            for tau in [sigma, sigma * SQRT_2] {
                for r in linspace(0.0, radius + 6.0 * tau, 200) {
                    worst = worst
                        .max((disk_conv(tau, radius, r) - disk_conv_oracle(tau, radius, r, &rule)).abs())
                        .max((circle_conv(tau, radius, r) - circle_conv_oracle(tau, radius, r, 4000)).abs());
                }
            }
        }
    }
    outcome(worst <= 1e-8, format!("max abs error {worst:.2e} (limit 1e-8)"))
}

fn constraints() -> Outcome {
    let mut cases: Vec<(SimpleRadialSpec, f64)> = [0.1, 0.2, 0.3, 0.5, 0.75]
        .iter()
        .map(|&s| (spec(&[1.0], &[1.0]), s))
        .collect();
    cases.push((spec(&[1.0, 1.5], &[1.0, -1.0]), 0.2));
    cases.push((spec(&[1.0, 1.4], &[1.0, -1.0]), 0.2));
    cases.push((spec(&[1.0, 1.1], &[1.0, 1.0]), 0.2));
    let (mut sat, mut curv) = (0.0f64, 0.0f64);
    let mut slowest = Duration::ZERO;
    for (s, sigma) in &cases {
        let t = Instant::now();
        let rep = certify(s, *sigma, &CertifyTolerances::default()).unwrap();
        slowest = slowest.max(t.elapsed());
        sat = rep.saturation_residuals.iter().fold(sat, |m, v| m.max(*v));
        curv = rep.curvature_residuals.iter().fold(curv, |m, v| m.max(*v));
    }
    outcome(
        sat <= 1e-6 && curv <= 1e-6 && slowest < Duration::from_secs(1),
        format!(
            "{} cases, max |f_v(R)-sign| {sat:.1e}, max |eta(R)-sign/R| {curv:.1e}, slowest {:.0} ms",
            cases.len(),
            slowest.as_secs_f64() * 1e3
        ),
    )
}

fn sigma_sweep() -> Outcome {
    let rows = sweep_sigma(
        &spec(&[1.0], &[1.0]),
        &[0.1, 0.2, 0.3, 0.5, 0.75],
        &CertifyTolerances::default(),
    )
    .unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for row in &rows {
        match &row.report {
            Ok(rep) => {
                let f2 = rep.fv_second_closed_form[0];
                ok &= rep.verdict == Verdict::Nondegenerate && f2 < 0.0 && rep.fv_second_numeric[0] < 0.0;
                parts.push(format!("{}: {} f''={f2:.3}", row.sigma, rep.verdict));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{}: {e}", row.sigma));
            }
        }
    }
    outcome(ok, parts.join(", "))
}

fn opposite_signs() -> Outcome {
    let tols = CertifyTolerances::default();
    let far = certify(&spec(&[1.0, 1.5], &[1.0, -1.0]), 0.2, &tols).unwrap();
    let near = certify(&spec(&[1.0, 1.4], &[1.0, -1.0]), 0.2, &tols).unwrap();
    outcome(
        far.verdict == Verdict::Nondegenerate && near.verdict != Verdict::Nondegenerate,
        format!(
            "R2=1.5: {} (sup {:.4}), R2=1.4: {} (sup {:.4})",
            far.verdict, far.sup_outside, near.verdict, near.sup_outside
        ),
    )
}

fn close_radii() -> Outcome {
    let tols = CertifyTolerances::default();
    let single = certify(&spec(&[1.0], &[1.0]), 0.2, &tols).unwrap().stability_margins[0];
    let pair = certify(&spec(&[1.0, 1.1], &[1.0, 1.0]), 0.2, &tols).unwrap();
    let m = &pair.stability_margins;
    outcome(
        pair.verdict == Verdict::Nondegenerate && m.iter().all(|&v| v > 0.0 && v < single),
        format!(
            "{}, margins {:.4} / {:.4} vs single-disk {single:.4}",
            pair.verdict, m[0], m[1]
        ),
    )
}

fn hessian_convergence() -> Outcome {
    let pc = solve_precert(&spec(&[1.0], &[1.0]), 0.2).unwrap();
    let (eta, eta_dr) = (pc.eta(1.0), pc.eta_dr(1.0));
    let mut min_order = f64::INFINITY;
    for k in [1.0, 2.0, 3.0, 4.0] {
        let exact = PI * k * k - PI * (eta + eta_dr);
        let errors: Vec<f64> = [256, 512, 1024, 2048]
            .iter()
            .map(|&m| {
                let c = CurveSample::circle([0.0, 0.0], 1.0, m).unwrap();
                let psi = FieldOnCurve::sample(&c, |p, _| (k * p[1].atan2(p[0])).cos());
                let v = j2(
                    &c,
                    &FieldOnCurve::constant(eta, m),
                    &FieldOnCurve::constant(eta_dr, m),
                    &psi,
                )
                .unwrap();
                (v - exact).abs()
            })
            .collect();
        min_order = orders(&errors).into_iter().fold(min_order, f64::min);
    }
    outcome(
        min_order >= 1.9,
        format!("minimum empirical order {min_order:.3} (limit 1.9)"),
    )
}

fn witness() -> Outcome {
    let m = 4096;
    let mut worst = f64::NEG_INFINITY;
    let mut found = 0;
    // (radius, arc as a fraction of the circle, alpha relative to (pi/L)^2)
    for (r, frac, rel) in [(1.0, 0.5, 1.0), (2.0, 0.25, 1.5), (0.5, 0.9, 3.0)] {
        let curve = CurveSample::circle([0.0, 0.0], r, m).unwrap();
        let seg = ArcSegment {
            start: 0,
            end: (frac * m as f64).round() as usize,
        };
        let alpha = rel * dirichlet_eigenvalue(seg.length(&curve).unwrap());
        let c = FieldOnCurve::constant(alpha, m);
        if let Some(psi) = noncoercivity_witness(&curve, &c, alpha, seg).unwrap() {
            found += 1;
            let v = j2(
                &curve,
                &FieldOnCurve::constant(1.0 / r, m),
                &FieldOnCurve::constant(alpha - 1.0 / (r * r), m),
                &psi,
            )
            .unwrap();
            worst = worst.max(v / curve.h1_norm_sq(&psi).unwrap());
        }
    }
    outcome(
        found == 3 && worst <= 1e-3,
        format!("{found}/3 witnesses, max j2/|psi|^2_H1 = {worst:.2e} (limit 1e-3)"),
    )
}

fn solver_certificate() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let op = ForwardBlurSubsample::new(2.0, 2, 32, 32, 1.0, Subsampling::Point).unwrap();
    let mut adj = 0.0f64;
    for _ in 0..10 {
        let u = GridImage::new(64, 64, 1.0, (0..4096).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let y = GridImage::new(32, 32, 2.0, (0..1024).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let lhs = op.forward(&u).unwrap().dot(&y);
        let rhs = u.dot(&op.adjoint(&y).unwrap());
        adj = adj.max((lhs - rhs).abs() / (u.norm() * y.norm()));
    }
    let u0 = make_phantom(PhantomKind::Disk { radius: 12.0 }, 64, 64, 1.0).unwrap();
    let y = op.forward(&u0).unwrap();
    match solve_tv(&op, &y, 0.01, &SolveParams::default()) {
        Ok(res) => outcome(
            res.normalized_gap() <= 1e-6 && adj <= 1e-10,
            format!(
                "gap {:.2e} after {} iterations, adjoint error {adj:.1e}",
                res.normalized_gap(),
                res.iterations
            ),
        ),
        Err(e) => outcome(false, format!("{e}; adjoint error {adj:.1e}")),
    }
}

fn support_structure() -> Outcome {
    let op = ForwardBlurSubsample::new(2.0, 5, 50, 50, 1.0, Subsampling::Point).unwrap();
    let solve = |y: &GridImage, lambda: f64, max_iter: usize| match solve_tv(
        &op,
        y,
        lambda,
        &SolveParams {
            max_iter,
            ..Default::default()
        },
    ) {
        Ok(r) => r,
        Err(Error::NotConverged { last: Some(r), .. }) => *r,
        Err(e) => panic!("{e}"),
    };

    let disk = make_phantom(PhantomKind::Disk { radius: 10.0 }, 250, 250, 1.0).unwrap();
    let res = solve(&op.forward(&disk).unwrap(), 0.003, 20_000);
    let ls = level_structure(&res.u, 0.5);
    let amp = ls.components.first().map_or(f64::NAN, |c| c.mean_amplitude);
    let disk_ok = ls.component_count == 1 && (amp - 1.0).abs() <= 0.1;

    let shapes = make_phantom(PhantomKind::ThreeShapes, 250, 250, 1.0).unwrap();
    let y = add_gaussian_noise(&op.forward(&shapes).unwrap(), 0.01, 1).unwrap();
    let res3 = solve(&y, 0.03, 40_000);
    let ls3 = level_structure(&res3.u, 0.25);
    let shapes_ok = ls3.signs() == vec![1, 1, -1];
    outcome(
        disk_ok && shapes_ok,
        format!(
            "disk: {} component(s), amplitude {amp:.3}, gap {:.1e}; three shapes: signs {:?}, amplitudes {:?}, gap {:.1e}",
            ls.component_count,
            res.normalized_gap(),
            ls3.signs(),
            ls3.components.iter().map(|c| (c.mean_amplitude * 1e3).round() / 1e3).collect::<Vec<_>>(),
            res3.normalized_gap()
        ),
    )
}

fn discrete_cross_validation() -> Outcome {
    let s = spec(&[1.0], &[1.0]);
    let pc = solve_precert(&s, 0.2).unwrap();
    let rep = certify(&s, 0.2, &CertifyTolerances::default()).unwrap();
    let sup = rep.window_maxima.iter().fold(rep.sup_outside, |m, v| m.max(*v));
    let target = sup.max(1.0);
    let eta = pc.eta_image(300, 300, 6.0 / 300.0).unwrap();
    match discrete_gnorm(&eta, &GnormParams::default()) {
        Ok(g) => outcome(
            (g.value - target).abs() <= 0.1 * target,
            format!(
                "G-norm {:.4} (lower {:.4}) vs max(1, sup|f_v|) = {target:.4}",
                g.value, g.lower
            ),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() {
    let criteria: [Criterion; 10] = [
        ("kernel oracle equivalence", kernel_oracles, 10),
        ("pre-certificate constraints", constraints, 10),
        ("single disk sigma sweep", sigma_sweep, 30),
        ("opposite signs R2=1.5 vs 1.4", opposite_signs, 5),
        ("close radii stability margins", close_radii, 5),
        ("shape Hessian convergence", hessian_convergence, 10),
        ("non-coercivity witness", witness, 5),
        ("solver self-certification", solver_certificate, 60),
        ("support structure", support_structure, 300),
        ("radial/discrete cross-validation", discrete_cross_validation, 120),
    ];
    let mut failures = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = run();
        let secs = t.elapsed().as_secs_f64();
        let pass = out.pass && secs < *budget as f64;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<34} {} ({secs:.1} s / {budget} s): {}",
            k + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            out.detail
        );
    }
    if failures > 0 {
        println!("{failures} criterion/criteria failed");
        std::process::exit(1);
    }
}
