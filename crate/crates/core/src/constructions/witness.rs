//! Witnesses for the interpolation-based constructions: a non-normal solution
//! with prescribed zeros, and a bounded zero-free solution taking two values
//! along prescribed sequences.

use std::sync::Arc;

use serde::Serialize;

use super::pick::{pick_solve, InterpolationProblem, SchurInterpolant};
use super::WitnessBundle;
use crate::error::{DiscError, Result};
use crate::hyperbolic::{difference, DiscPoint, C64};
use crate::kernel::{re, separation_constant, AnalyticOracle, BlaschkeProduct, Closed, ClosedForm, Frame, GridSpec, Jet, Series, Taylor, MAX_JET_ORDER};
use crate::locator::count_zeros;
use crate::parallel;

/// `1 - z/ξ`, exact at the frame centre when `ξ = 1`.
fn one_minus_over<T: Taylor>(xi: C64, at: Frame, order: usize) -> T {
    if xi == re(1.0) {
        T::one_minus_variable(at, order)
    } else {
        T::linear(at, order, re(1.0) - xi.conj() * at.center.value(), -xi.conj())
    }
}

fn xi_minus(xi: C64, z: &DiscPoint) -> C64 {
    if xi == re(1.0) {
        z.one_minus()
    } else {
        xi - z.value()
    }
}

/// `g = B h + log(1/(ξ - z))`, with the logarithm taken as `Log(1/ξ) - Log(1 - z/ξ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BmoaInterpolant {
    pub blaschke: BlaschkeProduct,
    pub h: SchurInterpolant,
    pub xi: C64,
    /// Interpolation data `ν_n` for `h`.
    pub nu: Vec<C64>,
    /// `sup (1 - |ζ_n|²) |w_n|`.
    pub s_bound: f64,
    /// Separation constant of the zeros.
    pub delta: f64,
    pub minimal_norm: f64,
}

impl ClosedForm for BmoaInterpolant {
    fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
        let b: T = self.blaschke.eval(at, order);
        let h: T = self.h.eval(at, order);
        b * h - one_minus_over::<T>(self.xi, at, order).ln() + C64::new(0.0, -self.xi.arg())
    }
}

impl BmoaInterpolant {
    /// `(S + 2) / δ`, the a-priori bound on `|ν_n|`.
    pub fn nu_bound(&self) -> f64 {
        (self.s_bound + 2.0) / self.delta
    }
}

fn default_xi(zeros: &[DiscPoint]) -> Result<C64> {
    let last = zeros.last().ok_or_else(|| DiscError::InvalidArgument("no zeros".into()))?;
    if last.norm() == 0.0 {
        return Err(DiscError::InvalidArgument("deepest zero is the origin; pass xi".into()));
    }
    Ok(last.value() / last.norm())
}

/// Builds `g` with `g'(ζ_n) = w_n`.
pub fn build_bmoa_interpolant(zeros: &[DiscPoint], w_targets: &[C64], xi: Option<C64>) -> Result<BmoaInterpolant> {
    if zeros.len() != w_targets.len() {
        return Err(DiscError::InvalidArgument("zeros and targets differ in length".into()));
    }
    let xi = match xi {
        Some(x) if x.norm() > 0.0 => x / x.norm(),
        Some(_) => return Err(DiscError::InvalidArgument("xi must be non-zero".into())),
        None => default_xi(zeros)?,
    };
    let blaschke = BlaschkeProduct::new(zeros.to_vec())?;
    let sep = separation_constant(&blaschke)?;
    let delta = sep.product_form.min(sep.derivative_form);
    let bo = blaschke.oracle();
    let s_bound = zeros
        .iter()
        .zip(w_targets)
        .map(|(z, w)| z.one_minus_norm_sqr() * w.norm())
        .fold(0.0, f64::max);
    let mut nu = Vec::with_capacity(zeros.len());
    for (z, w) in zeros.iter().zip(w_targets) {
        let b1 = bo.jet(*z, 1)?.derivative_at(1);
        nu.push((w - re(1.0) / xi_minus(xi, z)) / b1);
    }
    let bound = (s_bound + 2.0) / delta;
    if let Some(v) = nu.iter().find(|v| v.norm() > bound * (1.0 + 1e-9)) {
        return Err(DiscError::InvalidArgument(format!("|nu| = {} exceeds (S+2)/delta = {bound}", v.norm())));
    }
    let sol = pick_solve(&InterpolationProblem::new(zeros.to_vec(), nu.clone())?)?;
    let g = BmoaInterpolant {
        blaschke,
        h: sol.interpolant,
        xi,
        nu,
        s_bound,
        delta,
        minimal_norm: sol.minimal_norm,
    };
    let go = Closed(g.clone());
    for (z, w) in zeros.iter().zip(w_targets) {
        let d = go.jet(*z, 1)?.derivative_at(1);
        let err = (d - w).norm() / w.norm().max(1.0);
        if err > 1e-8 {
            return Err(DiscError::InterpolationResidual(err));
        }
    }
    Ok(g)
}

/// `f = B e^g`.
#[derive(Clone, Debug)]
pub struct NonnormalSolution(pub Arc<BmoaInterpolant>);

impl ClosedForm for NonnormalSolution {
    fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
        let b: T = self.0.blaschke.eval(at, order);
        b * self.0.eval::<T>(at, order).exp()
    }
}

/// `B e^{g - Re g(z)}` at each `z`: a constant multiple of `f` that stays in
/// floating-point range where `Re g` is huge.
#[derive(Clone, Debug)]
pub struct NormalizedNonnormalSolution(pub Arc<BmoaInterpolant>);

impl AnalyticOracle for NormalizedNonnormalSolution {
    fn jet(&self, z: DiscPoint, order: usize) -> Result<Jet> {
        let at: Frame = z.into();
        let b: Series = self.0.blaschke.eval(at, order);
        let g: Series = self.0.eval(at, order);
        let f = b * (g.clone() - re(g.value().re)).exp();
        Ok(Jet::from_series(&f, order.min(MAX_JET_ORDER)))
    }
}

/// `A = -(B'' + 2B'g')/B - g'² - g''`, with the removable singularities at the zeros of `B` filled in.
#[derive(Clone, Debug)]
pub struct NonnormalCoefficient(pub Arc<BmoaInterpolant>);

/// Points within this fraction of a zero's boundary gap use the desingularised expansion.
const REMOVED_ZONE: f64 = 0.25;
const REMOVED_SCALE: f64 = 0.1;
const REMOVED_EXTRA_ORDER: usize = 60;
const RICHARDSON_STEP: f64 = 2e-4;

impl NonnormalCoefficient {
    /// `(B'' + 2B'g', B, g', g'')` to `order + shift`.
    fn parts<T: Taylor>(&self, at: Frame, order: usize) -> (T, T, T, T) {
        let b: T = self.0.blaschke.eval(at, order + 2);
        let g: T = self.0.eval(at, order + 2);
        let b1 = b.derivative();
        let b2 = b1.derivative();
        let g1 = g.derivative();
        let g2 = g1.derivative();
        let g1 = g1.truncated(order);
        let num = b2 + b1.truncated(order) * g1.clone() * re(2.0);
        (num, b.truncated(order), g1, g2)
    }

    fn direct<T: Taylor>(&self, at: Frame, order: usize) -> T {
        let (num, b, g1, g2) = self.parts::<T>(at, order);
        -(num / b) - g1.square() - g2
    }

    /// Expansion about the `k`-th zero with the common factor `z - ζ_k` cancelled.
    fn removed(&self, k: usize, order: usize) -> Series {
        let zeta = self.0.blaschke.zeros()[k].0;
        let frame = Frame::new(zeta, REMOVED_SCALE * zeta.boundary_gap());
        let (num, b, g1, g2) = self.parts::<Series>(frame, order + 1);
        -(num.shifted() / b.shifted()) - g1.truncated(order).square() - g2.truncated(order)
    }

    fn nearby_zero(&self, z: &DiscPoint) -> Option<(usize, C64)> {
        self.0
            .blaschke
            .zeros()
            .iter()
            .enumerate()
            .map(|(k, (zeta, _))| (k, difference(z, zeta)))
            .filter(|(k, h)| h.norm() < REMOVED_ZONE * self.0.blaschke.zeros()[*k].0.boundary_gap())
            .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
    }

    /// Value at the `k`-th zero from the desingularised expansion.
    pub fn value_at_zero(&self, k: usize) -> C64 {
        self.removed(k, 8).value()
    }

    /// Largest relative gap between the value at the `k`-th zero and the limits
    /// of the raw quotient along the four axis directions (Richardson-extrapolated).
    pub fn removability_check(&self, k: usize) -> Result<f64> {
        let zeta = self.0.blaschke.zeros()[k].0;
        let a0 = self.value_at_zero(k);
        // three-level Richardson on each ray; a larger step keeps the direct
        // evaluation clear of cancellation next to the zero
        let t = RICHARDSON_STEP * zeta.boundary_gap();
        let mut worst: f64 = 0.0;
        for dir in [re(1.0), C64::new(0.0, 1.0), re(-1.0), C64::new(0.0, -1.0)] {
            let at = |s: f64| -> Result<C64> { Ok(self.direct::<Jet>(zeta.offset(dir * (s * t))?.into(), 0).value()) };
            let (v1, v2, v4) = (at(1.0)?, at(0.5)?, at(0.25)?);
            let r12 = v2 * 2.0 - v1;
            let r24 = v4 * 2.0 - v2;
            let limit = (r24 * 4.0 - r12) / 3.0;
            worst = worst.max((limit - a0).norm() / a0.norm().max(f64::MIN_POSITIVE));
        }
        Ok(worst)
    }
}

impl AnalyticOracle for NonnormalCoefficient {
    fn jet(&self, z: DiscPoint, order: usize) -> Result<Jet> {
        let j = if let Some((k, h)) = self.nearby_zero(&z) {
            let s = self.removed(k, order + REMOVED_EXTRA_ORDER);
            Jet::from_series(&s.recentered(z, h, order.min(MAX_JET_ORDER)), order)
        } else if order + 2 <= MAX_JET_ORDER {
            self.direct::<Jet>(z.into(), order)
        } else {
            Jet::from_series(&self.direct::<Series>(z.into(), order), order)
        };
        if j.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Ok(j)
        } else {
            Err(DiscError::Oracle {
                point: z.value(),
                reason: "non-finite coefficient".into(),
            })
        }
    }
}

/// A non-normal solution with prescribed zeros.
#[derive(Clone, Debug)]
pub struct NonnormalWitness {
    pub g: Arc<BmoaInterpolant>,
    pub coefficient: Arc<NonnormalCoefficient>,
    pub bundle: WitnessBundle,
}

impl NonnormalWitness {
    pub fn zeros(&self) -> Vec<DiscPoint> {
        self.g.blaschke.zeros().iter().map(|(z, _)| *z).collect()
    }

    /// `(1 - |ζ_n|²)|B'(ζ_n)| e^{Re g(ζ_n)}` computed without touching `f`.
    pub fn predicted_functional(&self) -> Result<Vec<f64>> {
        let bo = self.g.blaschke.oracle();
        let go = Closed((*self.g).clone());
        self.zeros()
            .iter()
            .map(|z| Ok(z.one_minus_norm_sqr() * bo.jet(*z, 1)?.derivative_at(1).norm() * go.value(*z)?.re.exp()))
            .collect()
    }
}

/// Dyadic test sequence `1 - 2^{-n}`, `n = 1..=n_max`.
pub fn dyadic_zeros(n_max: u32) -> Result<Vec<DiscPoint>> {
    (1..=n_max).map(|n| DiscPoint::from_one_minus(re(0.5f64.powi(n as i32)))).collect()
}

/// `f = B e^g` with `g'(ζ_n) = -B''(ζ_n)/(2B'(ζ_n))`, which makes `A = -f''/f` analytic.
pub fn build_nonnormal_witness(zeros: &[DiscPoint], xi: Option<C64>) -> Result<NonnormalWitness> {
    let b = BlaschkeProduct::new(zeros.to_vec())?;
    let bo = b.oracle();
    let w: Vec<C64> = zeros
        .iter()
        .map(|z| {
            let j = bo.jet(*z, 2)?;
            Ok(-j.derivative_at(2) / (j.derivative_at(1) * 2.0))
        })
        .collect::<Result<_>>()?;
    let g = Arc::new(build_bmoa_interpolant(zeros, &w, xi)?);
    let coefficient = Arc::new(NonnormalCoefficient(g.clone()));
    let bundle = WitnessBundle::new(
        format!("nonnormal_witness(N={})", zeros.len()),
        coefficient.clone(),
        Arc::new(Closed(NonnormalSolution(g.clone()))),
    )?
    .with_normalized(Arc::new(NormalizedNonnormalSolution(g.clone())))
    .with_meta("truncation", zeros.len() as f64)
    .with_meta("delta", g.delta)
    .with_meta("h_norm", g.h.norm)
    .with_meta("h_minimal_norm", g.minimal_norm)
    .with_meta("xi_re", g.xi.re)
    .with_meta("xi_im", g.xi.im)
    .with_prescribed(zeros.to_vec());
    Ok(NonnormalWitness { g, coefficient, bundle })
}

/// `f = exp(log a + h log(b/a))`.
#[derive(Clone, Debug)]
pub struct PrescribedSolution {
    pub h: Arc<SchurInterpolant>,
    pub log_a: C64,
    pub log_ratio: C64,
}

impl ClosedForm for PrescribedSolution {
    fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
        let h: T = self.h.eval(at, order);
        (h * self.log_ratio + self.log_a).exp()
    }
}

/// `A = -(h' log(b/a))² - h'' log(b/a)`.
#[derive(Clone, Debug)]
pub struct PrescribedCoefficient {
    pub h: Arc<SchurInterpolant>,
    pub log_ratio: C64,
}

impl ClosedForm for PrescribedCoefficient {
    fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
        let h: T = self.h.eval(at, order + 2);
        let h1 = h.derivative();
        let h2 = h1.derivative();
        let l = h1.truncated(order) * self.log_ratio;
        -l.square() - h2 * self.log_ratio
    }

    fn extra_order(&self) -> usize {
        2
    }
}

#[derive(Clone, Debug)]
pub struct PrescribedValuesWitness {
    pub h: Arc<SchurInterpolant>,
    /// Grid minimum of `|B_α| + |B_β|`.
    pub mu: f64,
    pub minimal_norm: f64,
    pub bundle: WitnessBundle,
}

/// Corona bounds below this are rejected.
pub const CORONA_FLOOR: f64 = 1e-6;

/// Grid used for the corona estimate when none is given.
pub fn corona_grid() -> GridSpec {
    GridSpec::Dyadic {
        k_max: 12,
        base_angles: 16,
        angle_cap: 4096,
    }
}

/// Solution equal to `a` along `alpha` and to `b` along `beta`.
pub fn build_prescribed_values_witness(alpha: &[DiscPoint], beta: &[DiscPoint], a: C64, b: C64, grid: &GridSpec) -> Result<PrescribedValuesWitness> {
    if a == re(0.0) || b == re(0.0) || a == b {
        return Err(DiscError::InvalidArgument("values must be non-zero and distinct".into()));
    }
    let ba = BlaschkeProduct::new(alpha.to_vec())?.oracle();
    let bb = BlaschkeProduct::new(beta.to_vec())?.oracle();
    let pts = grid.at(0).points()?;
    let mins = parallel::try_map(&pts, |z| Ok(ba.value(*z)?.norm() + bb.value(*z)?.norm()))?;
    let mu = mins.into_iter().fold(f64::INFINITY, f64::min);
    if mu < CORONA_FLOOR {
        return Err(DiscError::CoronaCondition(mu));
    }
    let nodes: Vec<DiscPoint> = alpha.iter().chain(beta).copied().collect();
    let targets: Vec<C64> = alpha.iter().map(|_| re(0.0)).chain(beta.iter().map(|_| re(1.0))).collect();
    let sol = pick_solve(&InterpolationProblem::new(nodes, targets)?)?;
    let h = Arc::new(sol.interpolant);
    let log_ratio = (b / a).ln();
    let f = Closed(PrescribedSolution {
        h: h.clone(),
        log_a: a.ln(),
        log_ratio,
    });
    let winding = count_zeros(&f, DiscPoint::origin(), 0.999)?;
    let bundle = WitnessBundle::new(
        format!("prescribed_values(a={a}, b={b})"),
        Arc::new(Closed(PrescribedCoefficient { h: h.clone(), log_ratio })),
        Arc::new(f),
    )?
    .with_meta("mu", mu)
    .with_meta("h_norm", h.norm)
    .with_meta("h_minimal_norm", sol.minimal_norm)
    .with_meta("zero_count_0999", winding as f64);
    Ok(PrescribedValuesWitness {
        h,
        mu,
        minimal_norm: sol.minimal_norm,
        bundle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::standard_residual_grid;
    use crate::kernel::Derivative;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bmoa_interpolant_hits_derivatives_and_log_values() {
        let zeros = dyadic_zeros(6).unwrap();
        let w: Vec<C64> = (0..6).map(|k| C64::new(k as f64, 1.0)).collect();
        let g = build_bmoa_interpolant(&zeros, &w, None).unwrap();
        assert_eq!(g.xi, re(1.0));
        let go = Closed(g.clone());
        for (n, z) in zeros.iter().enumerate() {
            let v = go.value(*z).unwrap();
            assert_abs_diff_eq!(v.re, (n + 1) as f64 * std::f64::consts::LN_2, epsilon = 1e-12);
            assert!(v.im.abs() < 1e-12);
        }
        assert!(g.nu.iter().all(|v| v.norm() <= g.nu_bound()));
    }

    #[test]
    fn nonnormal_witness_small() {
        let zeros = dyadic_zeros(8).unwrap();
        let wit = build_nonnormal_witness(&zeros, None).unwrap();
        let f = &wit.bundle.f;
        for z in &zeros {
            assert!(f.value(*z).unwrap().norm() < 1e-12);
        }
        for k in 0..zeros.len() {
            assert!(wit.coefficient.removability_check(k).unwrap() < 1e-6, "k = {k}");
        }
        let pred = wit.predicted_functional().unwrap();
        let df = Derivative(f.clone());
        for (n, z) in zeros.iter().enumerate() {
            let val = z.one_minus_norm_sqr() * df.value(*z).unwrap().norm();
            assert_abs_diff_eq!(val / pred[n], 1.0, epsilon = 1e-10);
            assert!(val <= 2f64.powi(n as i32 + 1) * (1.0 + 1e-12));
        }
        assert!(wit.bundle.residual(&standard_residual_grid()).unwrap() < 1e-8);
    }

    #[test]
    fn prescribed_values_small() {
        let alpha: Vec<DiscPoint> = (1..=3).map(|n| DiscPoint::from_one_minus(re(3f64.powi(-n))).unwrap()).collect();
        let beta: Vec<DiscPoint> = alpha.iter().map(|p| p.reflected()).collect();
        let grid = GridSpec::Polar {
            r_max: 0.99,
            n_radii: 20,
            n_angles: 64,
        };
        let w = build_prescribed_values_witness(&alpha, &beta, re(1.0), C64::new(0.0, 2.0), &grid).unwrap();
        for z in &alpha {
            assert!((w.bundle.f.value(*z).unwrap() - 1.0).norm() < 1e-7);
        }
        for z in &beta {
            assert!((w.bundle.f.value(*z).unwrap() - C64::new(0.0, 2.0)).norm() < 1e-7);
        }
        assert_eq!(w.bundle.metadata["zero_count_0999"], 0.0);
        assert!(w.bundle.residual(&standard_residual_grid()).unwrap() < 1e-8);
        let empty = build_prescribed_values_witness(&alpha, &[], re(3.0), re(2.0), &grid).unwrap();
        assert_abs_diff_eq!((empty.bundle.f.value(DiscPoint::new(C64::new(0.2, 0.5)).unwrap()).unwrap() - 3.0).norm(), 0.0, epsilon = 1e-14);
        assert_eq!(empty.bundle.a.value(DiscPoint::origin()).unwrap(), re(0.0));
        assert!(build_prescribed_values_witness(&alpha, &beta, re(1.0), re(1.0), &grid).is_err());
    }
}
