mod common;

use std::f64::consts::{PI, SQRT_2};

use common::*;
use proptest::prelude::*;
use tvcert::bessel::{i0e, i1e};
use tvcert::kernels::*;
use tvcert::quadrature::integrate_panels;

#[test]
fn disk_conv_matches_cartesian_oracle() {
    let rule = gauss_legendre(20);
    for sigma in [0.1, 0.2, 0.5] {
        for radius in [0.5, 1.0, 1.5] {
            for tau in [sigma, sigma * SQRT_2] {
                for r in linspace(0.0, radius + 6.0 * tau, 200) {
                    let got = disk_conv(tau, radius, r);
                    let want = disk_conv_oracle(tau, radius, r, &rule);
                    assert!(
                        (got - want).abs() <= 1e-8,
                        "tau={tau} R={radius} r={r}: {got} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn circle_conv_matches_angular_oracle() {
    for sigma in [0.1, 0.2, 0.5] {
        for radius in [0.5, 1.0, 1.5] {
            for tau in [sigma, sigma * SQRT_2] {
                for r in linspace(0.0, radius + 6.0 * tau, 200) {
                    let got = circle_conv(tau, radius, r);
                    let want = circle_conv_oracle(tau, radius, r, 4000);
                    assert!(
                        (got - want).abs() <= 1e-8,
                        "tau={tau} R={radius} r={r}: {got} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn frozen_reference_values() {
    // 30-digit evaluations, rounded to double
    let tau = 0.2 * SQRT_2;
    assert!((disk_conv(tau, 1.0, 0.5) - 0.941_388_598_286_884_2).abs() < 1e-12);
    assert!((circle_conv(tau, 1.0, 1.0) - 1.425_274_118_278_611_3).abs() < 1e-12);
    assert!((i0e(1.0) - 0.465_759_607_593_640_44).abs() < 1e-16);
    assert!((i1e(1.0) - 0.207_910_415_349_708_45).abs() < 1e-16);
}

#[test]
fn centered_values_and_tails() {
    for (tau, radius) in [(0.1f64, 0.5f64), (0.3, 1.0), (1.0, 0.2)] {
        let disk0 = 1.0 - (-radius * radius / (2.0 * tau * tau)).exp();
        assert!((disk_conv(tau, radius, 0.0) - disk0).abs() < 1e-13);
        let circ0 = radius / (tau * tau) * (-radius * radius / (2.0 * tau * tau)).exp();
        assert!((circle_conv(tau, radius, 0.0) - circ0).abs() < 1e-13 * circ0.max(1.0));
        assert_eq!(circle_conv_dr(tau, radius, 0.0), 0.0);
        assert!(disk_conv(tau, radius, radius + 10.0 * tau) < 1e-15);
    }
}

#[test]
fn circle_mass_is_perimeter() {
    for (tau, radius) in [(0.2 * SQRT_2, 1.0), (0.1, 0.5), (0.5, 1.5)] {
        let mass = 2.0
            * PI
            * integrate_panels(
                &|s: f64| circle_conv(tau, radius, s) * s,
                0.0,
                radius + 14.0 * tau,
                tau,
                1e-13,
            );
        assert!((mass - 2.0 * PI * radius).abs() < 1e-9, "{mass}");
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let h = 1e-6;
    for (tau, radius) in [(0.2 * SQRT_2, 1.0), (0.1, 0.5), (0.5 * SQRT_2, 1.5)] {
        for r in linspace(0.05, radius + 6.0 * tau, 60) {
            let fd = (disk_conv(tau, radius, r + h) - disk_conv(tau, radius, r - h)) / (2.0 * h);
            assert!((disk_conv_dr(tau, radius, r) - fd).abs() < 1e-6);
            let fd = (circle_conv(tau, radius, r + h) - circle_conv(tau, radius, r - h)) / (2.0 * h);
            assert!((circle_conv_dr(tau, radius, r) - fd).abs() < 1e-6);
        }
    }
    let tau = 0.2 * SQRT_2;
    let fd = (circle_conv(tau, 1.0, 1.2 + h) - circle_conv(tau, 1.0, 1.2 - h)) / (2.0 * h);
    assert!((circle_conv_dr(tau, 1.0, 1.2) - fd).abs() < 1e-6);
}

#[test]
fn circle_peak_location() {
    for (tau, radius) in [(0.1, 0.5), (0.3, 1.0), (0.5, 0.3)] {
        let grid = linspace(0.0, radius + 6.0 * tau, 4001);
        let (arg, _) = grid
            .iter()
            .map(|&r| (r, circle_conv(tau, radius, r)))
            .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        assert!(
            arg >= (radius - tau).max(0.0) - 1e-3 && arg <= radius + tau + 1e-3,
            "{arg}"
        );
    }
}

#[test]
fn huge_arguments_stay_finite() {
    let tau = 1e-3;
    let v = circle_conv(tau, 1.0, 1.0);
    assert!(v.is_finite() && v > 0.0);
    assert!(disk_conv_dr(tau, 1.0, 1.0).is_finite());
    assert!(circle_conv_dr(tau, 1.0, 1.0 + tau).is_finite());
    assert!(i0e(1e6).is_finite() && i1e(1e6).is_finite());
}

#[test]
fn moments_match_independent_integration() {
    let rule = gauss_legendre(20);
    let tau = 0.2 * SQRT_2;
    for radius in [0.5, 1.0] {
        for r in [0.3, 1.0, 1.7] {
            let want = composite(|s| disk_conv(tau, radius, s) * s, 0.0, r, 40, &rule);
            assert!((disk_moment(tau, radius, r) - want).abs() < 1e-11);
            let want = composite(|s| circle_conv(tau, radius, s) * s, 0.0, r, 40, &rule);
            assert!((circle_moment(tau, radius, r) - want).abs() < 1e-11);
        }
    }
}

proptest! {
    #[test]
    fn disk_conv_is_nonincreasing_and_bounded(tau in 0.05f64..1.0, radius in 0.1f64..2.0, r in 0.0f64..4.0, dr in 1e-4f64..0.5) {
        let a = disk_conv(tau, radius, r);
        let b = disk_conv(tau, radius, r + dr);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a + 1e-15);
        prop_assert!(disk_conv_dr(tau, radius, r) <= 1e-15);
    }

    #[test]
    fn circle_conv_is_nonnegative(tau in 0.05f64..1.0, radius in 0.1f64..2.0, r in 0.0f64..4.0) {
        prop_assert!(circle_conv(tau, radius, r) >= 0.0);
    }
}
