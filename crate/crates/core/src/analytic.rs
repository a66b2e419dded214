//! Exact quantities for Brownian motion from the origin killed at the unit
//! circle: the law of the directional maximum `M`, its first two moments,
//! the expected hull perimeter, the area bracket, and the star-hull radial
//! law and area.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec};

fn check_unit_interval(what: &'static str, a: f64) -> Result<()> {
    if (0.0..=1.0).contains(&a) {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: a,
            domain: "[0, 1]",
        })
    }
}

/// `P(M < a) = 2 arcsin a / (π − arccos a)`, extended by continuity to the
/// endpoints.
pub fn cdf_m(a: f64) -> Result<f64> {
    check_unit_interval("cdf_M", a)?;
    Ok(if a == 0.0 {
        0.0
    } else if a == 1.0 {
        1.0
    } else {
        2.0 * a.asin() / (PI - a.acos())
    })
}

/// `P(M ≥ a)`.
pub fn survival_m(a: f64) -> Result<f64> {
    Ok(1.0 - cdf_m(a)?)
}

/// `P(r(0) ≥ a) = 1 − (4/π) arctan √a` for the radial function of the trace.
pub fn radial_survival(a: f64) -> Result<f64> {
    check_unit_interval("radial_survival", a)?;
    Ok(if a == 1.0 {
        0.0
    } else {
        1.0 - 4.0 / PI * a.sqrt().atan()
    })
}

const SI_SERIES_MAX: f64 = 4.0;
const SI_ASYMPTOTIC_MIN: f64 = 64.0;

fn si_series(x: f64) -> f64 {
    // Σ (−1)^k x^(2k+1) / ((2k+1)·(2k+1)!)
    let x2 = x * x;
    let mut pow_fact = x; // x^(2k+1)/(2k+1)!
    let mut sum = x;
    for k in 1..40 {
        let n = (2 * k) as f64;
        pow_fact *= -x2 / (n * (n + 1.0));
        let term = pow_fact / (n + 1.0);
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum
}

fn si_asymptotic(x: f64) -> f64 {
    // Si(x) = π/2 − f(x) cos x − g(x) sin x with the divergent auxiliary
    // series truncated at their smallest term.
    let inv2 = 1.0 / (x * x);
    let mut f = 0.0;
    let mut term = 1.0 / x;
    let mut k = 0.0;
    loop {
        f += term;
        let next = -term * (2.0 * k + 1.0) * (2.0 * k + 2.0) * inv2;
        if next.abs() >= term.abs() || next.abs() < 1e-18 {
            break;
        }
        term = next;
        k += 1.0;
    }
    let mut g = 0.0;
    let mut term = inv2;
    let mut k = 0.0;
    loop {
        g += term;
        let next = -term * (2.0 * k + 2.0) * (2.0 * k + 3.0) * inv2;
        if next.abs() >= term.abs() || next.abs() < 1e-18 {
            break;
        }
        term = next;
        k += 1.0;
    }
    FRAC_PI_2 - f * x.cos() - g * x.sin()
}

fn sinc(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        u.sin() / u
    }
}

/// Sine integral `Si(x) = ∫_0^x sin u / u du`.
pub fn sine_integral(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SI_SERIES_MAX {
        si_series(ax)
    } else if ax < SI_ASYMPTOTIC_MIN {
        let spec = QuadratureSpec {
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            max_subdivisions: 50,
        };
        let panels = ((ax - SI_SERIES_MAX) / FRAC_PI_2).ceil() as usize;
        let width = (ax - SI_SERIES_MAX) / panels as f64;
        let mut total = si_series(SI_SERIES_MAX);
        for i in 0..panels {
            let lo = SI_SERIES_MAX + i as f64 * width;
            total += match integrate(sinc, lo, lo + width, &spec, "sin(u)/u") {
                Ok(v) => v,
                Err(Error::Convergence { estimate, .. }) => estimate,
                Err(_) => unreachable!("tolerances are positive"),
            };
        }
        total
    } else {
        si_asymptotic(ax)
    };
    v.copysign(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExpectedMMethod {
    Quadrature,
    SineIntegral,
}

fn truncated_weight(t: f64) -> f64 {
    1.0 - 2.0 * t / (FRAC_PI_2 + t)
}

pub fn expected_m(method: ExpectedMMethod, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    match method {
        ExpectedMMethod::Quadrature => integrate(
            |t| truncated_weight(t) * t.cos(),
            0.0,
            FRAC_PI_2,
            spec,
            "E[M]: (1 - 2t/(pi/2 + t)) cos t",
        ),
        ExpectedMMethod::SineIntegral => {
            Ok(PI * (sine_integral(PI) - sine_integral(FRAC_PI_2)) - 1.0)
        }
    }
}

/// `E[P] = 2π E[M]` by Cauchy's perimeter formula.
pub fn expected_perimeter(spec: &QuadratureSpec) -> Result<f64> {
    Ok(2.0 * PI * expected_m(ExpectedMMethod::SineIntegral, spec)?)
}

pub fn expected_m_squared(spec: &QuadratureSpec) -> Result<f64> {
    integrate(
        |t| truncated_weight(t) * (2.0 * t).sin(),
        0.0,
        FRAC_PI_2,
        spec,
        "E[M^2]: (1 - 2t/(pi/2 + t)) sin 2t",
    )
}

/// `E[M²] = 2 ∫_0^1 a P(M ≥ a) da`, the untransformed form.
pub fn expected_m_squared_via_survival(spec: &QuadratureSpec) -> Result<f64> {
    let v = integrate(
        |a| a * survival_m(a).unwrap_or(0.0),
        0.0,
        1.0,
        spec,
        "E[M^2]: a P(M >= a)",
    )?;
    Ok(2.0 * v)
}

/// `(π − 8/3, π E[M²])`.
pub fn area_bounds(spec: &QuadratureSpec) -> Result<(f64, f64)> {
    Ok((star_area_exact(), PI * expected_m_squared(spec)?))
}

/// Expected star-hull area, `π − 8/3`.
pub fn star_area_exact() -> f64 {
    PI - 8.0 / 3.0
}

/// `2π ∫_0^1 a P(r(0) ≥ a) da` by quadrature.
pub fn star_area_by_quadrature(spec: &QuadratureSpec) -> Result<f64> {
    let v = integrate(
        |a| a * radial_survival(a).unwrap_or(0.0),
        0.0,
        1.0,
        spec,
        "star area: a P(r(0) >= a)",
    )?;
    Ok(2.0 * PI * v)
}

/// `∫_0^1 a arctan √a da`, which equals 1/3.
pub fn arctan_sqrt_moment(spec: &QuadratureSpec) -> Result<f64> {
    integrate(
        |a| a * a.sqrt().atan(),
        0.0,
        1.0,
        spec,
        "a arctan(sqrt a)",
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticConstants {
    pub expected_m: f64,
    pub expected_perimeter: f64,
    pub expected_m_squared: f64,
    pub area_lower_bound: f64,
    pub area_upper_bound: f64,
    pub star_area_exact: f64,
}

impl AnalyticConstants {
    pub fn compute(spec: &QuadratureSpec) -> Result<Self> {
        let expected_m = expected_m(ExpectedMMethod::SineIntegral, spec)?;
        let expected_m_squared = expected_m_squared(spec)?;
        let (lo, hi) = area_bounds(spec)?;
        Ok(AnalyticConstants {
            expected_m,
            expected_perimeter: 2.0 * PI * expected_m,
            expected_m_squared,
            area_lower_bound: lo,
            area_upper_bound: hi,
            star_area_exact: star_area_exact(),
        })
    }

    /// Process-wide constants at the default quadrature tolerances.
    pub fn get() -> &'static AnalyticConstants {
        static CACHE: OnceLock<AnalyticConstants> = OnceLock::new();
        CACHE.get_or_init(|| {
            AnalyticConstants::compute(&QuadratureSpec::default())
                .expect("default quadrature converges for every smooth integrand")
        })
    }
}
