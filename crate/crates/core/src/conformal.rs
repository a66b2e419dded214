//! Harmonic-measure oracle for the laws of `M` and `r(0)`.
//!
//! The truncated disk `D_a = D ∩ {Re z < a}` is carried onto the upper
//! half-plane in two steps: the linear fractional map
//! `l_a(z) = (z − z₋)/(z₊ − z)` opens it to a wedge of angle
//! `β(a) = π − arccos a`, and `w ↦ w^{π/β}` flattens the wedge. The chord
//! `V_a` lands on `[0, ∞)`, whose half-plane harmonic measure from `z` is
//! `1 − arg z / π`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec};

pub type Complex = Complex64;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex),
    Infinity,
}

impl SpherePoint {
    pub fn finite(self) -> Option<Complex> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }
}

/// Tolerance band on the wedge rays.
const RAY_TOL: f64 = 1e-12;

/// `Φ(a) = 2π arcsin a / (π − arccos a)`, the argument of `f_a(0)`.
pub fn phi(a: f64) -> f64 {
    2.0 * PI * a.asin() / (PI - a.acos())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedDiskMap {
    pub a: f64,
    pub b: f64,
    pub z_plus: Complex,
    pub z_minus: Complex,
    pub beta: f64,
}

impl TruncatedDiskMap {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Domain {
                what: "truncated disk abscissa",
                value: a,
                domain: "(0, 1)",
            });
        }
        let b = (1.0 - a * a).sqrt();
        Ok(TruncatedDiskMap {
            a,
            b,
            z_plus: Complex::new(a, b),
            z_minus: Complex::new(a, -b),
            beta: PI - a.acos(),
        })
    }

    /// `l_a(z) = (z − z₋)/(z₊ − z)`.
    pub fn chord_map(&self, z: Complex) -> SpherePoint {
        let den = self.z_plus - z;
        if den == Complex::new(0.0, 0.0) {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite((z - self.z_minus) / den)
        }
    }

    /// `l_a(a + iy) = (y + b)/(b − y)` on the open chord.
    pub fn chord_map_on_chord(&self, y: f64) -> Result<f64> {
        if y.abs() >= self.b || y.is_nan() {
            return Err(Error::Domain {
                what: "chord ordinate",
                value: y,
                domain: "(-b, b)",
            });
        }
        Ok((y + self.b) / (self.b - y))
    }

    /// Power map `w ↦ w^{π/β}` on the closed wedge `arg w ∈ [0, β]`.
    pub fn wedge_to_halfplane(&self, w: Complex) -> Result<Complex> {
        if w == Complex::new(0.0, 0.0) {
            return Ok(w);
        }
        let mut theta = w.im.atan2(w.re);
        if theta < 0.0 {
            theta += TAU;
        }
        if theta > TAU - RAY_TOL {
            theta = 0.0;
        }
        if theta > self.beta + RAY_TOL {
            return Err(Error::Domain {
                what: "wedge argument",
                value: theta,
                domain: "[0, beta(a)]",
            });
        }
        let theta = theta.min(self.beta);
        let k = PI / self.beta;
        Ok(Complex::from_polar(w.norm().powf(k), theta * k))
    }

    /// `f_a = p_a ∘ l_a`, extended to the boundary.
    pub fn full_map(&self, z: Complex) -> Result<SpherePoint> {
        match self.chord_map(z) {
            SpherePoint::Infinity => Ok(SpherePoint::Infinity),
            SpherePoint::Finite(w) => Ok(SpherePoint::Finite(self.wedge_to_halfplane(w)?)),
        }
    }

    /// Closed form `f_a(0) = e^{iΦ(a)}`.
    pub fn full_map_of_origin(&self) -> Complex {
        Complex::from_polar(1.0, phi(self.a))
    }

    /// `f_a(0)` evaluated through the two maps.
    pub fn full_map_of_origin_composite(&self) -> Result<Complex> {
        let w = self
            .chord_map(Complex::new(0.0, 0.0))
            .finite()
            .expect("origin is never z_plus");
        self.wedge_to_halfplane(w)
    }
}

fn arg_upper(z: Complex, what: &'static str) -> Result<f64> {
    if z.im.is_nan() || z.im <= 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain {
            what,
            value: z.im,
            domain: "Im z > 0",
        });
    }
    Ok(z.im.atan2(z.re))
}

/// Harmonic measure of `[0, ∞)` in the upper half-plane seen from `z`:
/// `1 − arg z / π`.
pub fn half_plane_positive_ray_measure(z: Complex) -> Result<f64> {
    Ok(1.0 - arg_upper(z, "half-plane point")? / PI)
}

/// Same measure from the Poisson kernel `y / ((x − ξ)² + y²) / π`,
/// integrated over `[0, 10⁶]` with the `y/(L − x)` tail added.
pub fn poisson_positive_ray_measure(z: Complex, spec: &QuadratureSpec) -> Result<f64> {
    arg_upper(z, "half-plane point")?;
    const UPPER: f64 = 1e6;
    let (x, y) = (z.re, z.im);
    if x >= UPPER {
        return Err(Error::InvalidInput("point beyond the truncated kernel range".into()));
    }
    let kernel = |xi: f64| y / ((x - xi) * (x - xi) + y * y);

    // Break the range at multiples of y around the peak so each panel sees
    // a tame integrand.
    let mut breaks = vec![0.0, UPPER];
    let mut scale = 1.0;
    while y * scale < UPPER {
        for c in [x - y * scale, x + y * scale] {
            if c > 0.0 && c < UPPER {
                breaks.push(c);
            }
        }
        scale *= 4.0;
    }
    if x > 0.0 {
        breaks.push(x);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += integrate(kernel, w[0], w[1], spec, "half-plane Poisson kernel")?;
    }
    total += y / (UPPER - x);
    Ok(total / PI)
}

/// `P(M ≥ a)` through the conformal pipeline: `p_+(p_a(l_a(0)))`.
pub fn survival_via_conformal(a: f64) -> Result<f64> {
    let map = TruncatedDiskMap::new(a)?;
    half_plane_positive_ray_measure(map.full_map_of_origin_composite()?)
}

/// Disk automorphism `m_a(z) = (z − a)/(1 − a z)` carrying the slit disk
/// `D \ [a, 1)` onto `D \ [0, 1)`.
pub fn slit_disk_mobius(a: f64, z: Complex) -> Result<SpherePoint> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::Domain {
            what: "slit abscissa",
            value: a,
            domain: "[0, 1)",
        });
    }
    let den = Complex::new(1.0, 0.0) - z * a;
    if den == Complex::new(0.0, 0.0) {
        return Ok(SpherePoint::Infinity);
    }
    Ok(SpherePoint::Finite((z - a) / den))
}

pub fn reflect(z: Complex) -> Complex {
    -z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn map_construction() {
        let m = TruncatedDiskMap::new(0.5).unwrap();
        assert!((m.beta - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((m.z_plus.norm() - 1.0).abs() < 1e-14);
        assert!((m.z_minus.norm() - 1.0).abs() < 1e-14);
        assert!(TruncatedDiskMap::new(0.0).is_err());
        assert!(TruncatedDiskMap::new(1.0).is_err());
    }

    #[test]
    fn chord_map_special_points() {
        let m = TruncatedDiskMap::new(0.5).unwrap();
        let one = m.chord_map(c(0.5, 0.0)).finite().unwrap();
        assert!((one - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(m.chord_map(m.z_minus), SpherePoint::Finite(c(0.0, 0.0)));
        assert!(m.chord_map(m.z_plus).is_infinity());
        let o = m.chord_map(c(0.0, 0.0)).finite().unwrap();
        assert!((o.norm() - 1.0).abs() < 1e-15);
        assert!((o.arg() - PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn chord_parametrization() {
        let m = TruncatedDiskMap::new(0.3).unwrap();
        assert_eq!(m.chord_map_on_chord(0.0).unwrap(), 1.0);
        assert!(m.chord_map_on_chord(m.b).is_err());
        assert!(m.chord_map_on_chord(-m.b).is_err());
        assert!(m.chord_map_on_chord(m.b * (1.0 - 1e-12)).unwrap() > 1e11);
        assert!(m.chord_map_on_chord(-m.b * (1.0 - 1e-12)).unwrap() < 1e-11);
        let mut prev = 0.0;
        for i in 1..100 {
            let y = -m.b + 2.0 * m.b * i as f64 / 100.0;
            let v = m.chord_map_on_chord(y).unwrap();
            assert!(v > prev);
            prev = v;
            let w = m.chord_map(c(m.a, y)).finite().unwrap();
            assert!((w.re - v).abs() <= 1e-12 * v.max(1.0) && w.im.abs() < 1e-12 * v.max(1.0));
        }
    }

    #[test]
    fn power_map_rays() {
        let m = TruncatedDiskMap::new(0.5).unwrap();
        let w = m.wedge_to_halfplane(c(2.0, 0.0)).unwrap();
        assert_eq!(w.im, 0.0);
        assert!((w.re - 2f64.powf(1.5)).abs() < 1e-12);
        let w = m.wedge_to_halfplane(Complex::from_polar(1.0, m.beta)).unwrap();
        assert!(w.re < 0.0 && w.im.abs() < 1e-12);
        let w = m.wedge_to_halfplane(Complex::from_polar(1.0, PI / 3.0)).unwrap();
        assert!((w - c(0.0, 1.0)).norm() < 1e-12);
        assert_eq!(m.wedge_to_halfplane(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(m.wedge_to_halfplane(c(-1.0, -0.1)).is_err());
        assert!(m.wedge_to_halfplane(Complex::from_polar(1.0, m.beta + 1e-6)).is_err());
        // slightly below the real axis counts as the ray θ = 0
        assert!(m.wedge_to_halfplane(c(1.0, -1e-14)).is_ok());
    }

    #[test]
    fn origin_image() {
        let m = TruncatedDiskMap::new(0.5).unwrap();
        assert!((m.full_map_of_origin() - c(0.0, 1.0)).norm() < 1e-15);
        for i in 1..=50 {
            let a = i as f64 / 51.0;
            let m = TruncatedDiskMap::new(a).unwrap();
            let closed = m.full_map_of_origin();
            let composite = m.full_map_of_origin_composite().unwrap();
            assert!((composite.norm() - 1.0).abs() < 1e-12);
            assert!((closed - composite).norm() < 1e-12, "a={a}");
        }
    }

    #[test]
    fn positive_ray_measure() {
        assert!((half_plane_positive_ray_measure(c(0.0, 1.0)).unwrap() - 0.5).abs() < 1e-15);
        let z = Complex::from_polar(1.0, PI / 4.0);
        assert!((half_plane_positive_ray_measure(z).unwrap() - 0.75).abs() < 1e-15);
        assert!(half_plane_positive_ray_measure(c(1.0, 1e-12)).unwrap() > 1.0 - 1e-11);
        assert!(half_plane_positive_ray_measure(c(-1.0, 1e-12)).unwrap() < 1e-11);
        assert!(half_plane_positive_ray_measure(c(1.0, 0.0)).is_err());
        assert!(half_plane_positive_ray_measure(c(1.0, -1.0)).is_err());
    }

    #[test]
    fn mobius() {
        for a in [0.1, 0.5, 0.9] {
            assert_eq!(slit_disk_mobius(a, c(a, 0.0)).unwrap(), SpherePoint::Finite(c(0.0, 0.0)));
            let one = slit_disk_mobius(a, c(1.0, 0.0)).unwrap().finite().unwrap();
            assert!((one - c(1.0, 0.0)).norm() < 1e-15);
            let o = slit_disk_mobius(a, c(0.0, 0.0)).unwrap().finite().unwrap();
            assert_eq!(o, c(-a, 0.0));
            assert!(slit_disk_mobius(a, c(1.0 / a, 0.0)).unwrap().is_infinity());
            for k in 0..100 {
                let z = Complex::from_polar(1.0, TAU * k as f64 / 100.0);
                let w = slit_disk_mobius(a, z).unwrap().finite().unwrap();
                assert!((w.norm() - 1.0).abs() < 1e-12);
            }
            // segment [a, 1] onto [0, 1], monotonically
            let mut prev = -1.0;
            for k in 0..=20 {
                let x = a + (1.0 - a) * k as f64 / 20.0;
                let w = slit_disk_mobius(a, c(x, 0.0)).unwrap().finite().unwrap();
                assert!(w.im == 0.0 && (-1e-15..=1.0 + 1e-15).contains(&w.re) && w.re > prev);
                prev = w.re;
            }
        }
        assert!(slit_disk_mobius(1.0, c(0.0, 0.0)).is_err());
        assert_eq!(reflect(c(0.3, -0.2)), c(-0.3, 0.2));
    }
}
