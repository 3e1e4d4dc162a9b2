mod common;

use std::f64::consts::PI;

use common::orders;
use proptest::prelude::*;
use tvcert::stability::*;
use tvcert::*;

fn cos_mode(curve: &CurveSample, k: f64) -> FieldOnCurve {
    FieldOnCurve::sample(curve, |p, _| (k * p[1].atan2(p[0])).cos())
}

/// j2 on a circle of radius `r` with the radial field `eta` and its
/// derivative held constant along the curve.
fn j2_circle(r: f64, m: usize, eta: f64, eta_dr: f64, psi: impl Fn(&CurveSample) -> FieldOnCurve) -> f64 {
    let c = CurveSample::circle([0.0, 0.0], r, m).unwrap();
    let psi = psi(&c);
    j2(
        &c,
        &FieldOnCurve::constant(eta, m),
        &FieldOnCurve::constant(eta_dr, m),
        &psi,
    )
    .unwrap()
}

#[test]
fn j2_cosine_modes_converge_at_second_order() {
    let pc = solve_precert(&SimpleRadialSpec::new(vec![1.0], vec![1.0]).unwrap(), 0.2).unwrap();
    let (r, eta, eta_dr) = (1.0, pc.eta(1.0), pc.eta_dr(1.0));
    for k in [1.0, 2.0, 3.0, 5.0] {
        let exact = PI * k * k / r - PI * r * (eta / r + eta_dr);
        let errors: Vec<f64> = [256, 512, 1024, 2048]
            .iter()
            .map(|&m| (j2_circle(r, m, eta, eta_dr, |c| cos_mode(c, k)) - exact).abs())
            .collect();
        for o in orders(&errors) {
            assert!(o >= 1.9, "k={k}: errors {errors:?}");
        }
        assert!(errors[3] < 1e-3 * exact.abs().max(1.0));
    }
}

#[test]
fn j2_constant_mode_is_closed_form() {
    for (r, eta_dr) in [(1.0, -3.0), (0.7, 1.2), (2.5, 0.0)] {
        let exact = -2.0 * PI * r * (1.0 / (r * r) + eta_dr);
        let got = j2_circle(r, 1024, 1.0 / r, eta_dr, |c| FieldOnCurve::constant(1.0, c.len()));
        assert!((got - exact).abs() < 1e-10 * exact.abs().max(1.0), "{got} vs {exact}");
    }
}

#[test]
fn j2_matches_spectrum_numerators() {
    // j2(cos k theta) = R * (H1 norm) * quotient on a circle with potential c
    let (r, c) = (1.3, -0.4);
    let spectrum = circle_spectrum(r, c, 6).unwrap();
    let curve = CurveSample::circle([0.0, 0.0], r, 4096).unwrap();
    for mode in &spectrum.modes {
        let k = mode.k as f64;
        let psi = cos_mode(&curve, k);
        // c = H eta + d eta/d nu with eta = 1/R
        let value = j2(
            &curve,
            &FieldOnCurve::constant(1.0 / r, 4096),
            &FieldOnCurve::constant(c - 1.0 / (r * r), 4096),
            &psi,
        )
        .unwrap();
        let norm = curve.h1_norm_sq(&psi).unwrap();
        let scale = if mode.k == 0 { 2.0 } else { 1.0 };
        assert!((value / norm - mode.quotient).abs() < 1e-4, "k={k}");
        assert!((norm - scale * (PI * r + PI * k * k / r)).abs() < 1e-4 * norm);
    }
}

#[test]
fn spectrum_examples() {
    let s = circle_spectrum(1.0, 1.0, 5).unwrap();
    assert!((s.modes[0].quotient + 1.0).abs() < 1e-15);
    assert!(s.modes[1].quotient.abs() < 1e-15);
    assert!(s.modes[2..].iter().all(|m| m.quotient > 0.0));
    assert!(!s.is_coercive());

    let s = circle_spectrum(2.0, 0.0, 3).unwrap();
    assert_eq!(s.modes[0].quotient, 0.0);
    assert!(!s.is_coercive());

    for c in [-0.5, -1.0] {
        let s = circle_spectrum(1.7, c, 10).unwrap();
        assert!(s.is_coercive());
        assert!((s.min_quotient() + c).abs() < 1e-14);
        assert_eq!(s.modes[0].quotient, s.min_quotient());
    }
    // below c = -1 the quotients decrease toward 1 as k grows
    let s = circle_spectrum(1.7, -2.0, 10).unwrap();
    assert!(s.is_coercive());
    assert!(s.modes.windows(2).all(|w| w[1].quotient < w[0].quotient));
    assert!(s.min_quotient() > 1.0);
    assert!(circle_spectrum(-1.0, 0.0, 3).is_err());
}

#[test]
fn j1_closed_forms() {
    for m in [64, 256, 1024] {
        let c = CurveSample::circle([0.0, 0.0], 1.0, m).unwrap();
        let one = FieldOnCurve::constant(1.0, m);
        let zero = FieldOnCurve::constant(0.0, m);
        assert!((j1(&c, &zero, &one).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert_eq!(j1(&c, &zero, &zero).unwrap(), 0.0);
    }
}

#[test]
fn j1_vanishes_on_certified_circles() {
    let cases = [
        (vec![1.0], vec![1.0], 0.2),
        (vec![1.0, 1.5], vec![1.0, -1.0], 0.2),
        (vec![1.0, 1.1], vec![1.0, 1.0], 0.2),
    ];
    for (radii, amps, sigma) in cases {
        let spec = SimpleRadialSpec::new(radii, amps).unwrap();
        let pc = solve_precert(&spec, sigma).unwrap();
        for (i, &r) in spec.radii().iter().enumerate() {
            let curve = CurveSample::circle([0.0, 0.0], r, 512).unwrap();
            let xi = FieldOnCurve::sample(&curve, |p, _| spec.sign(i) * pc.eta(p[0].hypot(p[1])));
            let psi = FieldOnCurve::sample(&curve, |p, _| 1.0 + 0.5 * p[0] - p[1] * p[1]);
            assert!(j1(&curve, &xi, &psi).unwrap().abs() <= 1e-8);
        }
    }
}

#[test]
fn dimension_mismatch_is_reported() {
    let c = CurveSample::circle([0.0, 0.0], 1.0, 32).unwrap();
    let bad = FieldOnCurve::constant(1.0, 31);
    let ok = FieldOnCurve::constant(1.0, 32);
    assert!(matches!(j1(&c, &bad, &ok), Err(Error::DimensionMismatch { .. })));
    assert!(matches!(j2(&c, &ok, &ok, &bad), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn witness_examples() {
    let m = 4096;
    // a half circle of radius 1 has length pi
    let curve = CurveSample::circle([0.0, 0.0], 1.0, m).unwrap();
    let half = ArcSegment { start: 0, end: m / 2 };
    assert!((half.length(&curve).unwrap() - PI).abs() < 1e-12);
    let c = FieldOnCurve::constant(1.0, m);
    let psi = noncoercivity_witness(&curve, &c, 1.0, half)
        .unwrap()
        .expect("threshold case");
    // H eta + d eta/d nu = c with eta = 1/R = 1
    let value = j2(
        &curve,
        &FieldOnCurve::constant(1.0, m),
        &FieldOnCurve::constant(0.0, m),
        &psi,
    )
    .unwrap();
    let norm = curve.h1_norm_sq(&psi).unwrap();
    assert!(value <= 1e-3 * norm, "{value} vs {norm}");

    // an arc of length 1 needs alpha >= pi^2
    let short = ArcSegment {
        start: 0,
        end: (m as f64 / (2.0 * PI)).round() as usize,
    };
    assert!((short.length(&curve).unwrap() - 1.0).abs() < 2e-3);
    assert!(noncoercivity_witness(&curve, &c, 1.0, short).unwrap().is_none());

    assert!(matches!(
        noncoercivity_witness(&curve, &c, 1.0, ArcSegment { start: 5, end: 5 }),
        Err(Error::InvalidSegment(_))
    ));
    assert!(matches!(
        noncoercivity_witness(&curve, &c, 1.0, ArcSegment { start: 0, end: m }),
        Err(Error::InvalidSegment(_))
    ));
}

#[test]
fn witness_on_larger_potential_is_strictly_negative() {
    let m = 4096;
    let r = 2.0;
    let curve = CurveSample::circle([0.0, 0.0], r, m).unwrap();
    // an arc of length 2 (a wrapped one, through index 0)
    let len_idx = (2.0 / (2.0 * PI * r) * m as f64).round() as usize;
    let seg = ArcSegment {
        start: m - len_idx / 2,
        end: len_idx / 2,
    };
    let length = seg.length(&curve).unwrap();
    let alpha = 1.2 * dirichlet_eigenvalue(length);
    let c = FieldOnCurve::constant(alpha, m);
    let psi = noncoercivity_witness(&curve, &c, alpha, seg).unwrap().unwrap();
    let value = j2(
        &curve,
        &FieldOnCurve::constant(1.0 / r, m),
        &FieldOnCurve::constant(alpha - 1.0 / (r * r), m),
        &psi,
    )
    .unwrap();
    assert!(value < 0.0);
    assert_eq!(psi.values[seg.start], 0.0);
    assert_eq!(psi.values[seg.end], 0.0);
    assert_eq!(psi.values[m / 2], 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn j2_is_a_quadratic_form(a in -2.0f64..2.0, b in -2.0f64..2.0, k in 1u32..6, scale in -3.0f64..3.0) {
        let m = 256;
        let curve = CurveSample::circle([0.2, 0.1], 1.1, m).unwrap();
        let eta = FieldOnCurve::sample(&curve, |p, _| 0.5 + p[0]);
        let deta = FieldOnCurve::sample(&curve, |p, _| p[1] * p[1] - 1.0);
        let p1 = FieldOnCurve::sample(&curve, |p, _| a * p[0] + (k as f64 * p[1]).sin());
        let p2 = FieldOnCurve::sample(&curve, |p, _| b - p[0] * p[1]);
        let q = |psi: &FieldOnCurve| j2(&curve, &eta, &deta, psi).unwrap();
        let lhs = q(&p1.add(&p2)) + q(&p1.add(&p2.scaled(-1.0)));
        let rhs = 2.0 * q(&p1) + 2.0 * q(&p2);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
        let s = q(&p1.scaled(scale));
        prop_assert!((s - scale * scale * q(&p1)).abs() <= 1e-9 * s.abs().max(1.0));
    }
}
