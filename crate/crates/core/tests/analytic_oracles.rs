#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};

use bmhull::analytic::*;
use bmhull::quadrature::{integrate, QuadratureSpec};
use bmhull::Error;

// 30-digit references computed offline with mpmath.
const SI_PI: f64 = 1.85193705198246617;
const SI_HALF_PI: f64 = 1.37076216815448848;
const E_M: f64 = 0.511655480125896921;
const E_P: f64 = 3.21482619506495245;
const E_M2: f64 = 0.362777264163802853;
const UPPER: f64 = 1.13969838798640681;
const LOWER: f64 = 0.474925986923126572;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    s * h / 3.0
}

fn sinc(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        u.sin() / u
    }
}

#[test]
fn sine_integral_reference_values() {
    let table = [
        (0.5, 0.493107418043066689),
        (1.0, 0.946083070367183015),
        (FRAC_PI_2, SI_HALF_PI),
        (PI, SI_PI),
        (4.0, 1.75820313894905306),
        (10.0, 1.65834759421887405),
        (100.0, 1.56222546688905629),
    ];
    for (x, want) in table {
        let got = sine_integral(x);
        assert!((got - want).abs() < 1e-14, "Si({x}) = {got}, want {want}");
    }
}

#[test]
fn sine_integral_against_simpson() {
    for x in [0.1, 2.0, 3.9, 4.1, 7.5, 20.0, 63.9, 64.1, 80.0] {
        let oracle = simpson(sinc, 0.0, x, 200_000);
        assert!((sine_integral(x) - oracle).abs() < 1e-11, "x = {x}");
    }
}

#[test]
fn sine_integral_is_odd() {
    for i in 0..2000 {
        let x = i as f64 * 0.05 - 0.3;
        assert_eq!(sine_integral(-x), -sine_integral(x));
    }
    assert_eq!(sine_integral(0.0), 0.0);
}

#[test]
fn expected_m_both_routes() {
    let spec = QuadratureSpec::default();
    let q = expected_m(ExpectedMMethod::Quadrature, &spec).unwrap();
    let s = expected_m(ExpectedMMethod::SineIntegral, &spec).unwrap();
    assert!((q - s).abs() < 1e-10);
    assert!((s - E_M).abs() < 1e-12);
    assert!((s - 0.511655).abs() < 1e-4);
    // E[M] = ∫ P(M ≥ a) da straight from the law, in the a variable
    let oracle = simpson(|a| survival_m(a).unwrap(), 0.0, 1.0, 400_000);
    assert!((oracle - E_M).abs() < 1e-6);
}

#[test]
fn expected_perimeter_value() {
    let spec = QuadratureSpec::default();
    let p = expected_perimeter(&spec).unwrap();
    assert!((p - E_P).abs() < 1e-11);
    assert!((p - 3.214826).abs() < 1e-4);
    let closed = 2.0 * PI * PI * (sine_integral(PI) - sine_integral(FRAC_PI_2)) - 2.0 * PI;
    assert!((p - closed).abs() < 1e-10);
}

#[test]
fn second_moment_and_bounds() {
    let spec = QuadratureSpec::default();
    let m2 = expected_m_squared(&spec).unwrap();
    assert!((m2 - E_M2).abs() < 1e-11);
    assert!((m2 - expected_m_squared_via_survival(&spec).unwrap()).abs() < 1e-9);
    let oracle = 2.0 * simpson(|a| a * survival_m(a).unwrap(), 0.0, 1.0, 400_000);
    assert!((oracle - E_M2).abs() < 1e-6);

    let (lo, hi) = area_bounds(&spec).unwrap();
    assert!((lo - LOWER).abs() < 1e-15);
    assert!((hi - UPPER).abs() < 1e-10);
    assert!((lo - 0.474925).abs() < 1e-4 && (hi - 1.139699).abs() < 1e-4);
    assert_eq!(star_area_exact(), PI - 8.0 / 3.0);
    assert_eq!(format!("{:.6}", star_area_exact()), "0.474926");
}

#[test]
fn star_area_from_radial_law() {
    let spec = QuadratureSpec::default();
    assert!((star_area_by_quadrature(&spec).unwrap() - star_area_exact()).abs() < 1e-10);
    assert!((arctan_sqrt_moment(&spec).unwrap() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn constants_cache_agrees_with_direct_computation() {
    let c = AnalyticConstants::get();
    let direct = AnalyticConstants::compute(&QuadratureSpec::default()).unwrap();
    assert_eq!(*c, direct);
    assert!((c.expected_perimeter - 2.0 * PI * c.expected_m).abs() < 1e-15);
}

#[test]
fn cdf_is_strictly_increasing() {
    let n = 10_000;
    let mut prev = cdf_m(0.0).unwrap();
    assert_eq!(prev, 0.0);
    for i in 1..=n {
        let a = i as f64 / n as f64;
        let c = cdf_m(a).unwrap();
        assert!(c > prev, "cdf not increasing at {a}");
        prev = c;
    }
    assert_eq!(prev, 1.0);
    assert!((cdf_m(0.5).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn radial_survival_is_decreasing() {
    let n = 10_000;
    let mut prev = radial_survival(0.0).unwrap();
    assert_eq!(prev, 1.0);
    for i in 1..=n {
        let a = i as f64 / n as f64;
        let s = radial_survival(a).unwrap();
        assert!(s < prev, "radial survival not decreasing at {a}");
        prev = s;
    }
    assert_eq!(prev, 0.0);
    let median = FRAC_PI_8.tan().powi(2);
    assert!((median - 0.171572875253809902).abs() < 1e-16);
    assert!((radial_survival(median).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn laws_reject_points_outside_the_unit_interval() {
    for a in [-1e-9, 1.0 + 1e-9, f64::NAN] {
        assert!(matches!(cdf_m(a), Err(Error::Domain { .. })));
        assert!(matches!(survival_m(a), Err(Error::Domain { .. })));
        assert!(matches!(radial_survival(a), Err(Error::Domain { .. })));
    }
}

#[test]
fn quadrature_failure_names_the_integrand() {
    let spec = QuadratureSpec {
        abs_tol: 1e-15,
        rel_tol: 1e-15,
        max_subdivisions: 3,
    };
    match integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &spec, "sin(1/x)") {
        Err(Error::Convergence { integrand, .. }) => assert_eq!(integrand, "sin(1/x)"),
        other => panic!("expected a convergence error, got {other:?}"),
    }
}
