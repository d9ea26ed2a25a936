//! Hyperbolic geometry of the unit disc.
//!
//! Points carry their complement `1 - z` alongside the value. When a point is
//! built from that complement (points hugging the boundary near `1`), all
//! distances below stay accurate to relative precision even when `z` itself
//! rounds to `1.0` in double precision.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DiscError, Result};

pub type C64 = Complex64;

/// Points closer than this to the circle are rejected by [`DiscPoint::new`].
pub const EDGE_GUARD: f64 = 1e-15;

/// A point of the open unit disc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscPoint {
    value: C64,
    one_minus: C64,
    /// `1 - |z|^2`, fixed at construction from the most accurate data available.
    omn: f64,
}

fn omn_from(value: C64, one_minus: C64) -> f64 {
    if value.re > 0.5 {
        2.0 * one_minus.re - one_minus.norm_sqr()
    } else {
        let r = value.norm();
        (1.0 - r) * (1.0 + r)
    }
}

impl DiscPoint {
    pub fn new(value: C64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) || value.norm() >= 1.0 - EDGE_GUARD {
            return Err(DiscError::OutsideDisc(value));
        }
        let one_minus = C64::new(1.0, 0.0) - value;
        Ok(Self {
            value,
            one_minus,
            omn: omn_from(value, one_minus),
        })
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(C64::new(x, 0.0))
    }

    pub fn origin() -> Self {
        Self {
            value: C64::new(0.0, 0.0),
            one_minus: C64::new(1.0, 0.0),
            omn: 1.0,
        }
    }

    /// The point `1 - delta`, with `delta` kept exactly.
    pub fn from_one_minus(delta: C64) -> Result<Self> {
        let value = C64::new(1.0, 0.0) - delta;
        Self::checked(value, delta, omn_from(value, delta))
    }

    /// The point `(1 - gap) e^{i theta}`.
    pub fn from_polar_gap(gap: f64, theta: f64) -> Result<Self> {
        let unit = C64::from_polar(1.0, theta);
        let half = C64::from_polar(1.0, 0.5 * theta);
        // 1 - e^{it} = -2i sin(t/2) e^{it/2}
        let chord = C64::new(0.0, -2.0 * (0.5 * theta).sin()) * half;
        Self::checked(unit * (1.0 - gap), chord + unit * gap, gap * (2.0 - gap))
    }

    fn checked(value: C64, one_minus: C64, omn: f64) -> Result<Self> {
        if !(omn > 0.0) || !omn.is_finite() || !value.re.is_finite() || !value.im.is_finite() {
            return Err(DiscError::OutsideDisc(value));
        }
        Ok(Self { value, one_minus, omn })
    }

    pub(crate) fn from_parts_unchecked(value: C64, one_minus: C64, omn: f64) -> Self {
        Self { value, one_minus, omn }
    }

    /// `self + h`, keeping the complement accurate.
    pub fn offset(&self, h: C64) -> Result<Self> {
        let value = self.value + h;
        let one_minus = self.one_minus - h;
        // near 1 the complement is the accurate source; elsewhere update
        // 1 - |z + h|^2 = (1 - |z|^2) - 2 Re(conj(z) h) - |h|^2
        let omn = if value.re > 0.5 || h.norm() * 4.0 >= self.omn {
            omn_from(value, one_minus)
        } else {
            self.omn - 2.0 * (self.value.conj() * h).re - h.norm_sqr()
        };
        Self::checked(value, one_minus, omn)
    }

    /// The point `-z`.
    pub fn reflected(&self) -> Self {
        Self {
            value: -self.value,
            one_minus: C64::new(1.0, 0.0) + self.value,
            omn: self.omn,
        }
    }

    pub fn value(&self) -> C64 {
        self.value
    }

    /// `1 - z`, exact when the point was built from its complement.
    pub fn one_minus(&self) -> C64 {
        self.one_minus
    }

    pub fn norm(&self) -> f64 {
        self.value.norm()
    }

    /// `1 - |z|^2`.
    pub fn one_minus_norm_sqr(&self) -> f64 {
        self.omn
    }

    /// Euclidean distance to the unit circle, `1 - |z|`.
    pub fn boundary_gap(&self) -> f64 {
        self.one_minus_norm_sqr() / (1.0 + self.norm())
    }
}

fn near_one(a: &DiscPoint) -> bool {
    a.value.re > 0.5
}

/// `a - b`, computed from complements when both points sit near `1`.
pub fn difference(a: &DiscPoint, b: &DiscPoint) -> C64 {
    if near_one(a) && near_one(b) {
        b.one_minus - a.one_minus
    } else {
        a.value - b.value
    }
}

/// `1 - conj(a) b`.
pub fn one_minus_conj_product(a: &DiscPoint, b: &DiscPoint) -> C64 {
    if near_one(a) && near_one(b) {
        let ca = a.one_minus.conj();
        ca + b.one_minus - ca * b.one_minus
    } else {
        C64::new(1.0, 0.0) - a.value.conj() * b.value
    }
}

/// `|1 - conj(u) v|`, via `|1 - ū v|^2 = (1-|u|^2)(1-|v|^2) + |u - v|^2`.
fn kernel_modulus(u: &DiscPoint, v: &DiscPoint, diff: f64) -> f64 {
    (diff * diff + u.one_minus_norm_sqr() * v.one_minus_norm_sqr()).sqrt()
}

/// Pseudo-hyperbolic distance `|(u - v) / (1 - ū v)|`.
pub fn pseudo_distance(u: &DiscPoint, v: &DiscPoint) -> f64 {
    let d = difference(u, v).norm();
    if d == 0.0 {
        return 0.0;
    }
    (d / kernel_modulus(u, v, d)).min(1.0)
}

/// Hyperbolic distance `artanh(pseudo_distance(u, v))`.
pub fn hyperbolic_distance(u: &DiscPoint, v: &DiscPoint) -> f64 {
    let d = difference(u, v).norm();
    if d == 0.0 {
        return 0.0;
    }
    let den = kernel_modulus(u, v, d);
    let rho = d / den;
    if rho < 0.5 {
        rho.atanh()
    } else {
        // artanh(r) = ln(1+r) - ln(1-r^2)/2 with 1 - r^2 = g_u g_v / den^2
        let gg = u.one_minus_norm_sqr() * v.one_minus_norm_sqr();
        (1.0 + rho).ln() - 0.5 * gg.ln() + den.ln()
    }
}

/// The involutive disc automorphism `(a - z) / (1 - ā z)`.
pub fn automorphism(a: &DiscPoint, z: &DiscPoint) -> DiscPoint {
    let num = difference(a, z);
    let den = one_minus_conj_product(a, z);
    let value = num / den;
    // 1 - φ_a(z) = ((1-a) + z conj(1-a)) / (1 - ā z)
    let om = (a.one_minus + z.value * a.one_minus.conj()) / den;
    let omn = a.omn * z.omn / den.norm_sqr();
    DiscPoint::from_parts_unchecked(value, om, omn)
}

/// Derivative of the automorphism at `z`: `-(1 - |a|^2) / (1 - ā z)^2`.
pub fn automorphism_derivative(a: &DiscPoint, z: &DiscPoint) -> C64 {
    let den = one_minus_conj_product(a, z);
    -a.one_minus_norm_sqr() / (den * den)
}

/// Geodesic midpoint: move `u` to the origin, halve the radial distance, move back.
pub fn hyperbolic_midpoint(u: &DiscPoint, v: &DiscPoint) -> DiscPoint {
    let d = difference(u, v).norm();
    if d == 0.0 {
        return *u;
    }
    let den = kernel_modulus(u, v, d);
    let rho = (d / den).min(1.0);
    // tanh(x/2) = tanh x / (1 + sech x), sech(artanh rho) = sqrt(1 - rho^2)
    let sech = (u.one_minus_norm_sqr() * v.one_minus_norm_sqr()).sqrt() / den;
    let s = rho / (1.0 + sech);
    let image = automorphism(u, v).value();
    let dir = image / image.norm();
    let p = DiscPoint::from_parts_unchecked(dir * s, C64::new(1.0, 0.0) - dir * s, (1.0 - s) * (1.0 + s));
    automorphism(u, &p)
}

/// Euclidean centre and radius of the pseudo-hyperbolic disc `{z : ρ_p(z, a) < δ}`.
pub fn pseudo_disc(a: &DiscPoint, delta: f64) -> (C64, f64) {
    let r2 = a.norm() * a.norm();
    let den = 1.0 - delta * delta * r2;
    (
        a.value() * (1.0 - delta * delta) / den,
        delta * a.one_minus_norm_sqr() / den,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn p(re: f64, im: f64) -> DiscPoint {
        DiscPoint::new(C64::new(re, im)).unwrap()
    }

    #[test]
    fn rejects_boundary_points() {
        assert!(DiscPoint::real(1.0).is_err());
        assert!(DiscPoint::real(1.0 - 1e-16).is_err());
        assert!(DiscPoint::new(C64::new(0.0, -1.2)).is_err());
        assert!(DiscPoint::new(C64::new(f64::NAN, 0.0)).is_err());
        assert!(DiscPoint::real(0.999_999).is_ok());
        assert!(DiscPoint::from_one_minus(C64::new(-1e-20, 0.0)).is_err());
    }

    #[test]
    fn complement_survives_rounding() {
        let z = DiscPoint::from_one_minus(C64::new(1e-20, 0.0)).unwrap();
        assert_eq!(z.value().re, 1.0);
        assert_abs_diff_eq!(z.boundary_gap(), 1e-20, epsilon = 1e-34);
        let w = DiscPoint::from_one_minus(C64::new(4e-20, 0.0)).unwrap();
        // radial hyperbolic distance is ln(4)/2 in the limit
        assert_abs_diff_eq!(hyperbolic_distance(&z, &w), 0.5 * 4f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn pseudo_distance_examples() {
        assert_abs_diff_eq!(pseudo_distance(&DiscPoint::origin(), &p(0.5, 0.0)), 0.5, epsilon = 1e-15);
        let u = p(0.3, -0.2);
        assert_eq!(pseudo_distance(&u, &u), 0.0);
        assert_abs_diff_eq!(pseudo_distance(&p(0.5, 0.0), &p(-0.5, 0.0)), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn hyperbolic_distance_examples() {
        assert_abs_diff_eq!(
            hyperbolic_distance(&DiscPoint::origin(), &p(0.5, 0.0)),
            0.549_306_144_334_054_8,
            epsilon = 1e-13
        );
        let gamma: f64 = 1.3;
        let zeta = |n: f64| p((std::f64::consts::PI * n / (2.0 * gamma)).tanh(), 0.0);
        assert_abs_diff_eq!(
            hyperbolic_distance(&zeta(1.0), &zeta(2.0)),
            std::f64::consts::PI / (2.0 * gamma),
            epsilon = 1e-12
        );
    }

    #[test]
    fn automorphism_examples() {
        let a = p(0.4, 0.3);
        assert_abs_diff_eq!((automorphism(&a, &DiscPoint::origin()).value() - a.value()).norm(), 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(automorphism(&a, &a).value().norm(), 0.0, epsilon = 1e-16);
        let w = automorphism(&p(0.5, 0.0), &p(0.25, 0.0));
        assert_abs_diff_eq!(w.value().re, 0.25 / 0.875, epsilon = 1e-15);
    }

    #[test]
    fn midpoint_examples() {
        let m = hyperbolic_midpoint(&DiscPoint::origin(), &p(0.8, 0.0));
        assert_abs_diff_eq!(m.value().re, 0.5, epsilon = 1e-14);
        let u = p(-0.1, 0.6);
        assert_eq!(hyperbolic_midpoint(&u, &u), u);
    }

    /// Bisection along the geodesic from u to v (parametrised through φ_u) for
    /// the point equidistant from both ends.
    #[test]
    fn midpoint_matches_bisection_oracle() {
        let u = p(0.2, -0.7);
        let v = p(-0.6, 0.1);
        let image = automorphism(&u, &v).value();
        let dir = image / image.norm();
        let on_geodesic = |t: f64| automorphism(&u, &p(dir.re * t, dir.im * t));
        let (mut lo, mut hi) = (0.0, image.norm());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let q = on_geodesic(mid);
            if hyperbolic_distance(&q, &u) < hyperbolic_distance(&q, &v) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = on_geodesic(0.5 * (lo + hi));
        let m = hyperbolic_midpoint(&u, &v);
        assert_abs_diff_eq!((m.value() - oracle.value()).norm(), 0.0, epsilon = 1e-12);
        let half = 0.5 * hyperbolic_distance(&u, &v);
        assert_abs_diff_eq!(hyperbolic_distance(&m, &u), half, epsilon = 1e-12);
        assert_abs_diff_eq!(hyperbolic_distance(&m, &v), half, epsilon = 1e-12);
    }

    #[test]
    fn pseudo_disc_boundary_is_at_distance_delta() {
        let a = p(0.6, 0.2);
        let (c, r) = pseudo_disc(&a, 0.3);
        for k in 0..16 {
            let z = DiscPoint::new(c + C64::from_polar(r, k as f64)).unwrap();
            assert_abs_diff_eq!(pseudo_distance(&a, &z), 0.3, epsilon = 1e-12);
        }
    }

    fn arb_point() -> impl Strategy<Value = DiscPoint> {
        (0.0..0.98f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| p(r * t.cos(), r * t.sin()))
    }

    proptest! {
        #[test]
        fn mobius_invariance(a in arb_point(), u in arb_point(), v in arb_point()) {
            let lhs = pseudo_distance(&automorphism(&a, &u), &automorphism(&a, &v));
            prop_assert!((lhs - pseudo_distance(&u, &v)).abs() < 1e-12);
        }

        #[test]
        fn involution(a in arb_point(), z in arb_point()) {
            let back = automorphism(&a, &automorphism(&a, &z));
            prop_assert!((back.value() - z.value()).norm() < 1e-13);
        }

        #[test]
        fn distance_is_artanh_of_pseudo(u in arb_point(), v in arb_point()) {
            let h = hyperbolic_distance(&u, &v);
            let r = pseudo_distance(&u, &v).atanh();
            prop_assert!((h - r).abs() <= 1e-12 * (1.0 + r));
        }

        #[test]
        fn midpoint_symmetry(u in arb_point(), v in arb_point()) {
            let m1 = hyperbolic_midpoint(&u, &v);
            let m2 = hyperbolic_midpoint(&v, &u);
            prop_assert!((m1.value() - m2.value()).norm() < 1e-12);
        }
    }
}
