//! Closed-form example equations with explicit solutions.

use std::f64::consts::PI;
use std::sync::Arc;

use super::WitnessBundle;
use crate::error::{DiscError, Result};
use crate::hyperbolic::{DiscPoint, C64};
use crate::kernel::{re, AnalyticOracle, BlaschkeProduct, Closed, ClosedForm, Frame, GaugePsi, Taylor};

fn two_sided_validity(z: DiscPoint) -> f64 {
    z.one_minus().norm().min((z.value() + 1.0).norm())
}

/// `(1 + 4γ²) / (1 - z²)²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaCoefficient {
    pub gamma: f64,
}

impl ClosedForm for GammaCoefficient {
    fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
        let q = T::one_minus_variable(at, order) * (T::variable(at, order) + re(1.0));
        q.square().recip() * re(1.0 + 4.0 * self.gamma * self.gamma)
    }

    fn validity_radius(&self, z: DiscPoint) -> f64 {
        two_sided_validity(z)
    }
}

/// `√(1 - z²) sin(γ log((1 + z)/(1 - z)))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaSolution {
    pub gamma: f64,
}

impl ClosedForm for GammaSolution {
    fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
        let om = T::one_minus_variable(at, order);
        let op = T::variable(at, order) + re(1.0);
        let phase = (op.ln() - om.ln()) * re(self.gamma);
        (om * op).sqrt() * phase.sin()
    }

    fn validity_radius(&self, z: DiscPoint) -> f64 {
        two_sided_validity(z)
    }
}

/// The family `A = (1 + 4γ²)/(1 - z²)²` with zeros `tanh(πn/(2γ))`.
#[derive(Clone, Debug)]
pub struct GammaExample {
    pub gamma: f64,
    pub bundle: WitnessBundle,
}

impl GammaExample {
    /// The `n`-th zero, built from its exact complement so it stays accurate near `±1`.
    pub fn zero(&self, n: i64) -> DiscPoint {
        let x = PI * n.unsigned_abs() as f64 / self.gamma;
        // 1 - tanh(x/2) = 2 / (e^x + 1)
        let p = DiscPoint::from_one_minus(re(2.0 / (x.exp() + 1.0))).expect("zero lies in the disc");
        if n >= 0 {
            p
        } else {
            p.reflected()
        }
    }

    /// Zeros `ζ_n` for `n` in `range`.
    pub fn zeros(&self, range: std::ops::RangeInclusive<i64>) -> Vec<DiscPoint> {
        range.map(|n| self.zero(n)).collect()
    }

    /// Hyperbolic distance between consecutive zeros.
    pub fn zero_gap(&self) -> f64 {
        PI / (2.0 * self.gamma)
    }

    /// `sup (1 - |z|²)² |A(z)|`, attained on the real axis.
    pub fn coefficient_norm(&self) -> f64 {
        1.0 + 4.0 * self.gamma * self.gamma
    }
}

pub fn example_gamma(gamma: f64) -> Result<GammaExample> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(DiscError::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    let bundle = WitnessBundle::new(
        format!("gamma_example(gamma={gamma})"),
        Arc::new(Closed(GammaCoefficient { gamma })),
        Arc::new(Closed(GammaSolution { gamma })),
    )?
    .with_meta("gamma", gamma)
    .with_meta("coefficient_norm", 1.0 + 4.0 * gamma * gamma);
    Ok(GammaExample { gamma, bundle })
}

fn q_validity(z: DiscPoint) -> f64 {
    // Log(1 - z) is cut along [1, ∞); the power of L along z ≤ 1 - e
    z.one_minus().norm().min((z.value() - (1.0 - std::f64::consts::E)).norm())
}

/// `p'² + S_p / 2` with `p = (log(e/(1 - z)))^q`, written without differentiation:
/// with `u = 1/(1 - z)`, `L = 1 - Log(1 - z)` and `m = (q - 1)/L`,
/// `A = u² (q² L^{2q-2} + (m + 1 - (q - 1)/L² - (m + 1)²/2) / 2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QCoefficient {
    pub q: f64,
}

impl ClosedForm for QCoefficient {
    fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
        let q = self.q;
        let om = T::one_minus_variable(at, order);
        let u2 = om.square().recip();
        let l = -om.ln() + re(1.0);
        let linv = l.recip();
        let m1 = linv.clone() * re(q - 1.0) + re(1.0);
        let bracket = m1.clone() - linv.square() * re(q - 1.0) - m1.square() * re(0.5);
        let lp = (l.ln() * re(2.0 * q - 2.0)).exp();
        u2 * (lp * re(q * q) + bracket * re(0.5))
    }

    fn validity_radius(&self, z: DiscPoint) -> f64 {
        q_validity(z)
    }
}

/// `sin(p) / √p'`, with `1/√p' = q^{-1/2} L^{-(q-1)/2} (1 - z)^{1/2}` so every power
/// is principal on a half plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QSolution {
    pub q: f64,
}

impl ClosedForm for QSolution {
    fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
        let q = self.q;
        let om = T::one_minus_variable(at, order);
        let l = -om.ln() + re(1.0);
        let ll = l.ln();
        let p = (ll.clone() * re(q)).exp();
        let amp = (ll * re(-(q - 1.0) / 2.0)).exp() * om.sqrt() * re(q.powf(-0.5));
        p.sin() * amp
    }

    fn validity_radius(&self, z: DiscPoint) -> f64 {
        q_validity(z)
    }
}

/// The family with `p = (log(e/(1 - z)))^q`, zeros `1 - exp(1 - (nπ)^{1/q})`.
#[derive(Clone, Debug)]
pub struct QExample {
    pub q: f64,
    pub bundle: WitnessBundle,
}

impl QExample {
    /// The `n`-th zero for `n ≥ 1`.
    pub fn zero(&self, n: u32) -> Result<DiscPoint> {
        if n == 0 {
            return Err(DiscError::InvalidArgument("zero index starts at 1".into()));
        }
        DiscPoint::from_one_minus(re((1.0 - (n as f64 * PI).powf(1.0 / self.q)).exp()))
    }

    pub fn zeros(&self, range: std::ops::RangeInclusive<u32>) -> Result<Vec<DiscPoint>> {
        range.map(|n| self.zero(n)).collect()
    }

    /// `ψ(r) = (log(e/(1 - r)))^{1-q} / 2`.
    pub fn gauge(&self) -> Result<GaugePsi> {
        GaugePsi::log_power(self.q)
    }

    /// `(log 2e)^{q-1}`.
    pub fn smoothness_k(&self) -> f64 {
        (2.0 * std::f64::consts::E).ln().powf(self.q - 1.0)
    }

    /// Leading-order hyperbolic gap `(π/2q)(nπ)^{1/q - 1}`.
    pub fn gap_asymptotic(&self, n: u32) -> f64 {
        PI / (2.0 * self.q) * (n as f64 * PI).powf(1.0 / self.q - 1.0)
    }
}

pub fn example_q(q: f64) -> Result<QExample> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(DiscError::InvalidArgument(format!("q must exceed 1, got {q}")));
    }
    let bundle = WitnessBundle::new(
        format!("q_example(q={q})"),
        Arc::new(Closed(QCoefficient { q })),
        Arc::new(Closed(QSolution { q })),
    )?
    .with_meta("q", q)
    .with_gauge(GaugePsi::log_power(q)?);
    Ok(QExample { q, bundle })
}

/// `2 / (B + 2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientSolution(pub BlaschkeProduct);

impl ClosedForm for QuotientSolution {
    fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
        let b: T = self.0.eval(at, order);
        (b + re(2.0)).recip() * re(2.0)
    }
}

/// `(2B'' + B''B - 2B'²) / (B + 2)²`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientCoefficient(pub BlaschkeProduct);

impl ClosedForm for QuotientCoefficient {
    fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
        let b: T = self.0.eval(at, order + 2);
        let b1 = b.derivative();
        let b2 = b1.derivative();
        let b = b.truncated(order);
        let b1 = b1.truncated(order);
        let num = b2.clone() * re(2.0) + b2 * b.clone() - b1.square() * re(2.0);
        num / (b + re(2.0)).square()
    }

    fn extra_order(&self) -> usize {
        2
    }
}

/// The bounded zero-free solution built from a Blaschke product.
pub fn example_blaschke_quotient(b: BlaschkeProduct) -> Result<WitnessBundle> {
    let degree = b.degree() as f64;
    Ok(WitnessBundle::new(
        format!("blaschke_quotient(degree={degree})"),
        Arc::new(Closed(QuotientCoefficient(b.clone()))),
        Arc::new(Closed(QuotientSolution(b))),
    )?
    .with_meta("degree", degree))
}

/// `(1 - z)^{-(1+10i)/100} - (1 - z)^{-i/100}`: locally univalent but not normal.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Lappan;

impl ClosedForm for Lappan {
    fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
        let ln = T::one_minus_variable(at, order).ln();
        (ln.clone() * C64::new(-0.01, -0.1)).exp() - (ln * C64::new(0.0, -0.01)).exp()
    }

    fn validity_radius(&self, z: DiscPoint) -> f64 {
        z.one_minus().norm()
    }
}

pub fn lappan_function() -> Closed<Lappan> {
    Closed(Lappan)
}

/// Checks `|f'' + A f|` at `z` against the size of the terms.
pub fn relative_residual_at<A: AnalyticOracle + ?Sized, F: AnalyticOracle + ?Sized>(a: &A, f: &F, z: DiscPoint) -> Result<f64> {
    let j = f.jet(z, 2)?;
    let av = a.value(z)?;
    let f2 = j.derivative_at(2);
    let num = (f2 + av * j.value()).norm();
    if num == 0.0 {
        return Ok(0.0);
    }
    Ok(num / (f2.norm() + av.norm() * j.value().norm()).max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::hyperbolic_distance;
    use crate::kernel::Derivative;
    use approx::assert_abs_diff_eq;

    fn pt(x: f64, y: f64) -> DiscPoint {
        DiscPoint::new(C64::new(x, y)).unwrap()
    }

    #[test]
    fn gamma_zero_formula() {
        let g = example_gamma(1.0).unwrap();
        assert_abs_diff_eq!(g.zero(1).value().re, 0.917152, epsilon = 1e-6);
        assert_eq!(g.zero(0), DiscPoint::origin());
        assert_eq!(g.bundle.f.value(DiscPoint::origin()).unwrap(), re(0.0));
        for n in -3..3 {
            let d = hyperbolic_distance(&g.zero(n), &g.zero(n + 1));
            assert_abs_diff_eq!(d, g.zero_gap(), epsilon = 1e-12);
        }
        for n in [1, 2, 3] {
            assert!(g.bundle.f.value(g.zero(n)).unwrap().norm() < 1e-13);
        }
        let half = example_gamma(0.5).unwrap();
        let z8 = half.zero(8);
        assert!(z8.boundary_gap() < 1e-21);
        assert_abs_diff_eq!(hyperbolic_distance(&half.zero(7), &z8), PI, epsilon = 1e-10);
        assert_abs_diff_eq!(half.zero(-2).value().re, -half.zero(2).value().re);
        assert!(example_gamma(0.0).is_err());
    }

    #[test]
    fn gamma_residual_and_initial_data() {
        let g = example_gamma(2.0).unwrap();
        let (f0, f1) = g.bundle.initial.unwrap();
        assert_eq!(f0, re(0.0));
        assert_abs_diff_eq!(f1.re, 4.0, epsilon = 1e-14);
        for z in [pt(0.3, 0.4), pt(-0.9, 0.1), pt(0.99, 0.0), DiscPoint::from_polar_gap(1e-8, 0.2).unwrap()] {
            assert!(relative_residual_at(&g.bundle.a, &g.bundle.f, z).unwrap() < 1e-12);
        }
    }

    #[test]
    fn q_example_zeros_and_residual() {
        let e = example_q(2.0).unwrap();
        assert_abs_diff_eq!(e.zero(1).unwrap().value().re, 0.538121704, epsilon = 1e-9);
        for n in 1..=6 {
            let z = e.zero(n).unwrap();
            assert!(e.bundle.f.value(z).unwrap().norm() < 1e-12, "n = {n}");
        }
        for z in [pt(0.2, -0.5), pt(0.95, 0.05), pt(-0.8, 0.0), DiscPoint::from_polar_gap(1e-6, 0.0).unwrap()] {
            assert!(relative_residual_at(&e.bundle.a, &e.bundle.f, z).unwrap() < 1e-11, "{z:?}");
        }
        assert_abs_diff_eq!(e.smoothness_k(), (2.0 * std::f64::consts::E).ln(), epsilon = 1e-15);
        assert!(example_q(1.0).is_err());
    }

    #[test]
    fn q_coefficient_matches_schwarzian_of_p() {
        // independent route: A = p'^2 + S_p / 2 from jets of p itself
        struct P;
        impl ClosedForm for P {
            fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
                (-T::one_minus_variable(at, order).ln() + re(1.0)).powc(re(2.0))
            }
        }
        let z = pt(0.4, 0.3);
        let pj = Closed(P).jet(z, 4).unwrap();
        let p1 = pj.derivative_at(1);
        let s = crate::kernel::schwarzian(&Closed(P), z).unwrap();
        let want = p1 * p1 + s * 0.5;
        let got = Closed(QCoefficient { q: 2.0 }).value(z).unwrap();
        assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-12 * want.norm());
    }

    #[test]
    fn blaschke_quotient_identities() {
        let b = BlaschkeProduct::new(vec![pt(0.5, 0.0), pt(-0.5, 0.0)]).unwrap();
        let w = example_blaschke_quotient(b.clone()).unwrap();
        let bo = b.oracle();
        for z in [pt(0.1, 0.7), pt(-0.3, -0.2), pt(0.9, 0.0)] {
            let lhs = w.f.value(z).unwrap() * (bo.value(z).unwrap() + 2.0);
            assert_abs_diff_eq!((lhs - 2.0).norm(), 0.0, epsilon = 1e-14);
            assert!(relative_residual_at(&w.a, &w.f, z).unwrap() < 1e-10);
            let m = w.f.value(z).unwrap().norm();
            assert!((2.0 / 3.0..=2.0).contains(&m));
        }
        assert!(Derivative(w.f.clone()).value(DiscPoint::origin()).unwrap().norm() < 1e-15);
    }

    #[test]
    fn lappan_vanishes_at_origin() {
        let l = lappan_function();
        assert_eq!(l.value(DiscPoint::origin()).unwrap(), re(0.0));
        let z = pt(0.3, 0.1);
        let j = l.jet(z, 1).unwrap();
        let om = C64::new(1.0, 0.0) - z.value();
        let d = C64::new(0.01, 0.1) * om.powc(C64::new(-1.01, -0.1)) - C64::new(0.0, 0.01) * om.powc(C64::new(-1.0, -0.01));
        assert_abs_diff_eq!((j.derivative_at(1) - d).norm(), 0.0, epsilon = 1e-14);
    }
}
