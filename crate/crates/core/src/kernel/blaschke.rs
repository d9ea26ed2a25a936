//! Finite Blaschke products.

use serde::Serialize;

use super::oracle::{AnalyticOracle, Closed, ClosedForm};
use super::taylor::{Frame, Jet, Taylor};
use crate::error::{DiscError, Result};
use crate::hyperbolic::{difference, one_minus_conj_product, pseudo_distance, DiscPoint, C64};

/// Zeros closer than this (pseudo-hyperbolically) count as the same point.
const COINCIDENCE: f64 = 1e-12;

/// `∏ (|ζ|/ζ) (ζ - z)/(1 - ζ̄ z)` over a finite list of zeros, with `|ζ|/ζ = 1` at `ζ = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlaschkeProduct {
    zeros: Vec<(DiscPoint, u32)>,
}

fn unimodular(zeta: &DiscPoint) -> C64 {
    let v = zeta.value();
    if v.norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        C64::new(v.norm(), 0.0) / v
    }
}

impl BlaschkeProduct {
    /// Simple zeros; a repeated point is an error.
    pub fn new(zeros: Vec<DiscPoint>) -> Result<Self> {
        Self::with_multiplicities(zeros.into_iter().map(|z| (z, 1)).collect())
    }

    pub fn with_multiplicities(zeros: Vec<(DiscPoint, u32)>) -> Result<Self> {
        for (i, (a, m)) in zeros.iter().enumerate() {
            if *m == 0 {
                return Err(DiscError::InvalidArgument("zero multiplicity must be positive".into()));
            }
            if zeros[..i].iter().any(|(b, _)| pseudo_distance(a, b) < COINCIDENCE) {
                return Err(DiscError::Multiplicity(a.value()));
            }
        }
        Ok(Self { zeros })
    }

    pub fn empty() -> Self {
        Self { zeros: Vec::new() }
    }

    pub fn zeros(&self) -> &[(DiscPoint, u32)] {
        &self.zeros
    }

    pub fn degree(&self) -> u32 {
        self.zeros.iter().map(|(_, m)| m).sum()
    }

    /// Plain evaluation at any complex `z` that is not a pole (including the unit circle).
    pub fn eval_anywhere(&self, z: C64) -> C64 {
        self.zeros.iter().fold(C64::new(1.0, 0.0), |acc, (zeta, m)| {
            let a = zeta.value();
            let f = unimodular(zeta) * (a - z) / (C64::new(1.0, 0.0) - a.conj() * z);
            acc * f.powu(*m)
        })
    }

    /// `B'(ζ_k)` at a simple zero, from the factored form.
    pub fn derivative_at_zero(&self, k: usize) -> C64 {
        let (zk, _) = self.zeros[k];
        let others = self
            .zeros
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .fold(C64::new(1.0, 0.0), |acc, (_, (zeta, m))| {
                let f = unimodular(zeta) * difference(zeta, &zk) / one_minus_conj_product(zeta, &zk);
                acc * f.powu(*m)
            });
        -unimodular(&zk) * others / zk.one_minus_norm_sqr()
    }

    pub fn oracle(&self) -> Closed<BlaschkeProduct> {
        Closed(self.clone())
    }
}

impl ClosedForm for BlaschkeProduct {
    fn eval<T: Taylor>(&self, frame: Frame, order: usize) -> T {
        let at = frame.center;
        let one = T::constant(frame, order, C64::new(1.0, 0.0));
        let mut num = one.clone();
        let mut den = one;
        for (zeta, m) in &self.zeros {
            let u = unimodular(zeta);
            let n0 = difference(zeta, &at);
            let d0 = one_minus_conj_product(zeta, &at);
            let d1 = -zeta.value().conj();
            for _ in 0..*m {
                num = num.mul_linear(n0 * u, -u);
                den = den.mul_linear(d0, d1);
            }
        }
        num / den
    }

    fn validity_radius(&self, z: DiscPoint) -> f64 {
        self.zeros
            .iter()
            .filter(|(zeta, _)| zeta.norm() > 0.0)
            .map(|(zeta, _)| (C64::new(1.0, 0.0) / zeta.value().conj() - z.value()).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Jet of `B` at `z`.
pub fn blaschke_jet(b: &BlaschkeProduct, z: DiscPoint, order: usize) -> Result<Jet> {
    b.oracle().jet(z, order)
}

/// Both routes to the separation constant of a zero set with simple zeros.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparationConstant {
    /// `min_k (1 - |ζ_k|^2) |B'(ζ_k)|`, from jets of `B`.
    pub derivative_form: f64,
    /// `min_k ∏_{n≠k} ρ_p(ζ_n, ζ_k)`.
    pub product_form: f64,
    /// Index of a minimising zero.
    pub argmin: usize,
}

pub fn separation_constant(b: &BlaschkeProduct) -> Result<SeparationConstant> {
    if let Some((z, _)) = b.zeros.iter().find(|(_, m)| *m > 1) {
        return Err(DiscError::Multiplicity(z.value()));
    }
    if b.zeros.is_empty() {
        return Err(DiscError::InvalidArgument("no zeros".into()));
    }
    let oracle = b.oracle();
    let mut best = SeparationConstant {
        derivative_form: f64::INFINITY,
        product_form: f64::INFINITY,
        argmin: 0,
    };
    for (k, (zk, _)) in b.zeros.iter().enumerate() {
        let d = oracle.jet(*zk, 1)?.coeffs()[1].norm() * zk.one_minus_norm_sqr();
        let p: f64 = b
            .zeros
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, (zn, _))| pseudo_distance(zn, zk))
            .product();
        if d < best.derivative_form {
            best.derivative_form = d;
            best.argmin = k;
        }
        best.product_form = best.product_form.min(p);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::taylor::re;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(re: f64, im: f64) -> DiscPoint {
        DiscPoint::new(C64::new(re, im)).unwrap()
    }

    #[test]
    fn single_zero_at_origin_is_minus_identity() {
        // the unimodular factor is 1 at the origin, leaving (0 - z)/1
        let b = BlaschkeProduct::new(vec![DiscPoint::origin()]).unwrap();
        let j = blaschke_jet(&b, pt(0.3, 0.0), 2).unwrap();
        assert_abs_diff_eq!((j.value() + re(0.3)).norm(), 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(j.value().norm(), 0.3, epsilon = 1e-16);
    }

    #[test]
    fn symmetric_pair_matches_hand_formula() {
        let b = BlaschkeProduct::new(vec![pt(0.5, 0.0), pt(-0.5, 0.0)]).unwrap();
        let j = blaschke_jet(&b, DiscPoint::origin(), 3).unwrap();
        assert_abs_diff_eq!(j.value().re, 0.25, epsilon = 1e-16);
        assert_abs_diff_eq!(j.coeffs()[1].norm(), 0.0, epsilon = 1e-16);
        // (0.25 - z^2)/(1 - 0.25 z^2) = 0.25 - (1 - 0.0625) z^2 + ...
        assert_abs_diff_eq!(j.coeffs()[2].re, -0.9375, epsilon = 1e-15);
        let z = pt(0.1, 0.7);
        let v = z.value();
        let hand = (re(0.25) - v * v) / (re(1.0) - v * v * 0.25);
        assert_abs_diff_eq!((blaschke_jet(&b, z, 0).unwrap().value() - hand).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn single_zero_derivative_identity() {
        let b = BlaschkeProduct::new(vec![pt(0.5, 0.0)]).unwrap();
        let d = blaschke_jet(&b, pt(0.5, 0.0), 1).unwrap().coeffs()[1];
        assert_abs_diff_eq!(0.75 * d.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn separation_examples() {
        let one = BlaschkeProduct::new(vec![pt(0.5, 0.0)]).unwrap();
        let s = separation_constant(&one).unwrap();
        assert_abs_diff_eq!(s.derivative_form, 1.0, epsilon = 1e-15);
        assert_eq!(s.product_form, 1.0);

        let two = BlaschkeProduct::new(vec![DiscPoint::origin(), pt(0.5, 0.0)]).unwrap();
        let s = separation_constant(&two).unwrap();
        assert_abs_diff_eq!(s.derivative_form, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.product_form, 0.5, epsilon = 1e-15);

        let dyadic: Vec<_> = (1..=10)
            .map(|n| DiscPoint::from_one_minus(re(0.5f64.powi(n))).unwrap())
            .collect();
        let s = separation_constant(&BlaschkeProduct::new(dyadic).unwrap()).unwrap();
        assert!(s.product_form > 0.0 && s.product_form < 1.0);
        assert_abs_diff_eq!(s.derivative_form, s.product_form, epsilon = 1e-10);
    }

    #[test]
    fn duplicate_zero_is_rejected() {
        let err = BlaschkeProduct::new(vec![pt(0.2, 0.1), pt(0.2, 0.1)]).unwrap_err();
        assert!(matches!(err, DiscError::Multiplicity(_)));
        let b = BlaschkeProduct::with_multiplicities(vec![(pt(0.2, 0.1), 2)]).unwrap();
        assert!(matches!(separation_constant(&b), Err(DiscError::Multiplicity(_))));
    }

    #[test]
    fn random_zero_sets_satisfy_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=12);
            let zeros: Vec<_> = (0..n)
                .map(|_| {
                    let r: f64 = rng.gen_range(0.0..0.95);
                    let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    pt(r * t.cos(), r * t.sin())
                })
                .collect();
            let b = BlaschkeProduct::new(zeros.clone()).unwrap();
            for (k, zk) in zeros.iter().enumerate() {
                let prod: f64 = zeros
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != k)
                    .map(|(_, zn)| pseudo_distance(zn, zk))
                    .product();
                let lhs = zk.one_minus_norm_sqr() * blaschke_jet(&b, *zk, 1).unwrap().coeffs()[1].norm();
                assert!((lhs - prod).abs() < 1e-10);
                assert!((zk.one_minus_norm_sqr() * b.derivative_at_zero(k).norm() - prod).abs() < 1e-10);
            }
            let r: f64 = rng.gen_range(0.0..0.99);
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            assert!(blaschke_jet(&b, pt(r * t.cos(), r * t.sin()), 0).unwrap().value().norm() < 1.0);
            assert!((b.eval_anywhere(C64::from_polar(1.0, t)).norm() - 1.0).abs() < 1e-12);
        }
    }
}
