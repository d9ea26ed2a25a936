//! Power-series solutions of `f'' + A f = 0` and their analytic continuation.
//!
//! Every local expansion is stored in the scaled variable `t = (z - center) / R`
//! where `R` is the step radius, so coefficients stay of moderate size even a
//! few ulps away from the unit circle.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{DiscError, Result};
use crate::hyperbolic::{difference, DiscPoint, C64};
use crate::kernel::{AnalyticOracle, Frame, Jet, Series, SharedOracle, Taylor, MAX_JET_ORDER};

/// Tuning for local solves and continuation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OdeSettings {
    /// Step radius as a fraction of the distance to the nearest singularity.
    pub rho_safe: f64,
    /// Tail tolerance, relative to the largest scaled coefficient.
    pub tol: f64,
    pub min_order: usize,
    pub max_order: usize,
    /// Continuation moves this fraction of the local radius per step.
    pub step_fraction: f64,
    /// Smallest admissible radius, relative to the singularity distance.
    pub min_radius: f64,
}

impl Default for OdeSettings {
    fn default() -> Self {
        Self {
            rho_safe: 0.5,
            tol: 1e-14,
            min_order: 24,
            max_order: 192,
            step_fraction: 0.9,
            min_radius: 1e-6,
        }
    }
}

/// One power-series piece of a solution.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSolution {
    /// Coefficients in `t = (z - center) / radius`.
    pub series: Series,
    pub radius: f64,
    pub f0: C64,
    pub f0p: C64,
}

impl LocalSolution {
    pub fn center(&self) -> DiscPoint {
        self.series.center()
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// Unscaled Taylor coefficient `f^{(k)}(center) / k!`.
    pub fn taylor_coefficient(&self, k: usize) -> C64 {
        self.series.coeffs()[k] / self.radius.powi(k as i32)
    }

    /// `(f, f')` at `center + h`.
    pub fn eval(&self, h: C64) -> (C64, C64) {
        let t = h / self.radius;
        let c = self.series.coeffs();
        let mut v = C64::new(0.0, 0.0);
        let mut d = C64::new(0.0, 0.0);
        for &ck in c.iter().rev() {
            d = d * t + v;
            v = v * t + ck;
        }
        (v, d / self.radius)
    }

    /// Expansion at `center + h` in a frame of the given scale, up to `order`.
    pub fn series_at(&self, h: C64, order: usize, scale: f64) -> Result<Series> {
        let at = self.center().offset(h)?;
        let out = self.series.recentered(at, h, order);
        Ok(if scale == self.radius { out } else { out.rescaled(scale) })
    }

    /// Unit-scale jet at `center + h`.
    pub fn jet_at(&self, h: C64, order: usize) -> Result<Jet> {
        let s = self.series_at(h, order.min(MAX_JET_ORDER), self.radius)?;
        Ok(Jet::from_series(&s, order))
    }

    pub fn contains(&self, z: &DiscPoint) -> bool {
        difference(z, &self.center()).norm() <= self.radius
    }
}

fn recurrence(a: &[C64], r2: f64, f0: C64, f0p_scaled: C64, order: usize) -> Vec<C64> {
    let mut b = vec![C64::new(0.0, 0.0); order + 1];
    b[0] = f0;
    if order >= 1 {
        b[1] = f0p_scaled;
    }
    for k in 0..order.saturating_sub(1) {
        let mut s = C64::new(0.0, 0.0);
        for j in 0..=k {
            s += a[j] * b[k - j];
        }
        b[k + 2] = -s * (r2 / ((k + 2) * (k + 1)) as f64);
    }
    b
}

fn tail_ok(b: &[C64], tol: f64) -> bool {
    let n = b.len() - 1;
    let scale = b.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return true;
    }
    if !scale.is_finite() {
        return false;
    }
    b[n].norm().max(b[n - 1].norm()) <= tol * scale
}

/// Local solves for several initial data at one centre, sharing the radius and order.
pub fn solve_local<O: AnalyticOracle + ?Sized>(
    a: &O,
    z0: DiscPoint,
    data: &[(C64, C64)],
    min_order: usize,
    st: &OdeSettings,
) -> Result<Vec<LocalSolution>> {
    let reach = a.validity_radius(z0).min(z0.boundary_gap());
    let mut radius = st.rho_safe * reach;
    let floor = st.min_radius * reach;
    let mut order = st.min_order.max(min_order);
    let mut a_series = a.series(Frame::new(z0, radius), order)?;
    loop {
        let coeffs: Vec<Vec<C64>> = data
            .iter()
            .map(|&(f0, f0p)| recurrence(a_series.coeffs(), radius * radius, f0, f0p * radius, order))
            .collect();
        if coeffs.iter().all(|b| tail_ok(b, st.tol)) {
            return Ok(coeffs
                .into_iter()
                .zip(data)
                .map(|(b, &(f0, f0p))| LocalSolution {
                    series: Series::from_coeffs(Frame::new(z0, radius), &b),
                    radius,
                    f0,
                    f0p,
                })
                .collect());
        }
        if order < st.max_order {
            order = (2 * order).min(st.max_order);
            a_series = a.series(Frame::new(z0, radius), order)?;
        } else {
            radius *= 0.5;
            if radius < floor {
                return Err(DiscError::StepSize(z0.value()));
            }
            a_series = a_series.rescaled(radius);
        }
    }
}

/// Single local power-series solution with `f(z0) = f0`, `f'(z0) = f0p`.
pub fn series_solve<O: AnalyticOracle + ?Sized>(a: &O, z0: DiscPoint, f0: C64, f0p: C64, order: usize) -> Result<LocalSolution> {
    if order < 4 {
        return Err(DiscError::InvalidArgument(format!("series order {order} below 4")));
    }
    Ok(solve_local(a, z0, &[(f0, f0p)], order, &OdeSettings::default())?.remove(0))
}

/// Walks from the centre of `start` to `to`, re-expanding as it goes.
/// Returns the local solutions centred at `to`; visited pieces go to `chain`.
pub fn advance<O: AnalyticOracle + ?Sized>(
    a: &O,
    start: Vec<LocalSolution>,
    to: DiscPoint,
    st: &OdeSettings,
    mut chain: Option<&mut Vec<Vec<LocalSolution>>>,
) -> Result<Vec<LocalSolution>> {
    let mut cur = start;
    loop {
        let c = cur[0].center();
        let radius = cur[0].radius;
        let rem = difference(&to, &c);
        let dist = rem.norm();
        if dist == 0.0 {
            return Ok(cur);
        }
        let reach = st.step_fraction * radius;
        let (next, h, done) = if dist <= reach {
            (to, rem, true)
        } else {
            let h = rem * (reach / dist);
            (c.offset(h).map_err(|_| DiscError::Continuation(c.value()))?, h, false)
        };
        let data: Vec<(C64, C64)> = cur.iter().map(|s| s.eval(h)).collect();
        let min_order = cur[0].order() / 2;
        let solved = solve_local(a, next, &data, min_order, st).map_err(|e| match e {
            DiscError::StepSize(p) => DiscError::Continuation(p),
            other => other,
        })?;
        if let Some(ch) = chain.as_deref_mut() {
            ch.push(std::mem::replace(&mut cur, solved));
        } else {
            cur = solved;
        }
        if done {
            return Ok(cur);
        }
    }
}

/// Piecewise solution along a path; each piece's centre lies in the previous piece's disc.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionChain {
    pub pieces: Vec<LocalSolution>,
}

impl SolutionChain {
    /// Piece whose disc contains `z`, preferring the latest.
    pub fn piece_for(&self, z: &DiscPoint) -> Option<&LocalSolution> {
        self.pieces.iter().rev().find(|p| p.contains(z))
    }

    /// `(f, f')` at a point covered by the chain.
    pub fn eval(&self, z: &DiscPoint) -> Result<(C64, C64)> {
        let p = self.piece_for(z).ok_or(DiscError::Continuation(z.value()))?;
        Ok(p.eval(difference(z, &p.center())))
    }

    pub fn end(&self) -> &LocalSolution {
        self.pieces.last().expect("chain is never empty")
    }
}

/// Continues the solution with data `(f0, f0p)` at `path[0]` through every vertex.
pub fn continue_along<O: AnalyticOracle + ?Sized>(a: &O, path: &[DiscPoint], f0: C64, f0p: C64) -> Result<SolutionChain> {
    continue_many(a, path, &[(f0, f0p)], &OdeSettings::default()).map(|mut v| v.remove(0))
}

fn continue_many<O: AnalyticOracle + ?Sized>(
    a: &O,
    path: &[DiscPoint],
    data: &[(C64, C64)],
    st: &OdeSettings,
) -> Result<Vec<SolutionChain>> {
    let first = *path.first().ok_or_else(|| DiscError::InvalidArgument("empty path".into()))?;
    let mut cur = solve_local(a, first, data, 0, st)?;
    let mut pieces: Vec<Vec<LocalSolution>> = Vec::new();
    for &p in &path[1..] {
        cur = advance(a, cur, p, st, Some(&mut pieces))?;
    }
    pieces.push(cur);
    Ok((0..data.len())
        .map(|i| SolutionChain {
            pieces: pieces.iter().map(|v| v[i].clone()).collect(),
        })
        .collect())
}

/// Jets of several solutions (given by data at `base`) at each point, visiting
/// the points in order along the polyline `base → p_1 → p_2 → …`.
pub fn jets_along_path<O: AnalyticOracle + ?Sized>(
    a: &O,
    base: DiscPoint,
    data: &[(C64, C64)],
    points: &[DiscPoint],
    order: usize,
    st: &OdeSettings,
) -> Result<Vec<Vec<Jet>>> {
    let mut cur = solve_local(a, base, data, 0, st)?;
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        cur = advance(a, cur, *p, st, None)?;
        out.push(
            cur.iter()
                .map(|s| s.jet_at(C64::new(0.0, 0.0), order))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(out)
}

/// A solution of `f'' + A f = 0` fixed by its data at a base point, as an oracle.
/// Values elsewhere come from continuation along straight segments.
#[derive(Clone)]
pub struct SolutionOracle {
    pub a: SharedOracle,
    pub base: DiscPoint,
    pub f0: C64,
    pub f0p: C64,
    pub settings: OdeSettings,
}

impl std::fmt::Debug for SolutionOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolutionOracle")
            .field("base", &self.base)
            .field("f0", &self.f0)
            .field("f0p", &self.f0p)
            .finish()
    }
}

impl SolutionOracle {
    pub fn new(a: SharedOracle, base: DiscPoint, f0: C64, f0p: C64) -> Self {
        Self {
            a,
            base,
            f0,
            f0p,
            settings: OdeSettings::default(),
        }
    }

    fn local_at(&self, z: DiscPoint, min_order: usize) -> Result<LocalSolution> {
        let start = solve_local(&*self.a, self.base, &[(self.f0, self.f0p)], 0, &self.settings)?;
        let mut here = advance(&*self.a, start, z, &self.settings, None)?.remove(0);
        if here.order() < min_order {
            here = solve_local(&*self.a, z, &[(here.f0, here.f0p)], min_order, &self.settings)?.remove(0);
        }
        Ok(here)
    }
}

impl AnalyticOracle for SolutionOracle {
    fn jet(&self, z: DiscPoint, order: usize) -> Result<Jet> {
        self.local_at(z, 0)?.jet_at(C64::new(0.0, 0.0), order)
    }

    fn validity_radius(&self, z: DiscPoint) -> f64 {
        self.a.validity_radius(z)
    }

    fn series(&self, frame: Frame, order: usize) -> Result<Series> {
        let local = self.local_at(frame.center, order)?;
        local.series_at(C64::new(0.0, 0.0), order, frame.scale)
    }

    fn jets_along(&self, points: &[DiscPoint], order: usize) -> Result<Vec<Jet>> {
        Ok(jets_along_path(&*self.a, self.base, &[(self.f0, self.f0p)], points, order, &self.settings)?
            .into_iter()
            .map(|mut v| v.remove(0))
            .collect())
    }
}

/// `f1` with data `(0, 1)` and `f2` with data `(1, 0)` at the base point.
#[derive(Clone, Debug)]
pub struct SolutionBasis {
    pub f1: SolutionOracle,
    pub f2: SolutionOracle,
    /// `W(f1, f2) = f1 f2' - f1' f2` at the base point.
    pub wronskian: C64,
}

const BASIS_DATA: [(C64, C64); 2] = [(C64::new(0.0, 0.0), C64::new(1.0, 0.0)), (C64::new(1.0, 0.0), C64::new(0.0, 0.0))];

impl SolutionBasis {
    pub fn a(&self) -> &SharedOracle {
        &self.f1.a
    }

    pub fn base(&self) -> DiscPoint {
        self.f1.base
    }

    /// `[jet of f1, jet of f2]` at each point, continuing along the polyline through them.
    pub fn jets_along(&self, points: &[DiscPoint], order: usize) -> Result<Vec<[Jet; 2]>> {
        Ok(jets_along_path(&**self.a(), self.base(), &BASIS_DATA, points, order, &self.f1.settings)?
            .into_iter()
            .map(|v| [v[0], v[1]])
            .collect())
    }

    /// Chains of `f1` and `f2` along a path starting at the base point.
    pub fn chains_along(&self, path: &[DiscPoint]) -> Result<(SolutionChain, SolutionChain)> {
        let mut full = vec![self.base()];
        full.extend_from_slice(path);
        let mut v = continue_many(&**self.a(), &full, &BASIS_DATA, &self.f1.settings)?;
        let f2 = v.pop().expect("two chains");
        let f1 = v.pop().expect("two chains");
        Ok((f1, f2))
    }

    /// The quotient `w = f1 / f2` is handled through its numerator and denominator jets.
    pub fn wronskian_at(jets: &[Jet; 2]) -> C64 {
        let [f1, f2] = jets;
        f1.value() * f2.derivative_at(1) - f1.derivative_at(1) * f2.value()
    }
}

pub fn solution_basis(a: SharedOracle, z0: DiscPoint) -> Result<SolutionBasis> {
    // fail early if A cannot be expanded at the base point
    solve_local(&*a, z0, &BASIS_DATA, 0, &OdeSettings::default())?;
    Ok(SolutionBasis {
        f1: SolutionOracle::new(a.clone(), z0, BASIS_DATA[0].0, BASIS_DATA[0].1),
        f2: SolutionOracle::new(a, z0, BASIS_DATA[1].0, BASIS_DATA[1].1),
        wronskian: C64::new(-1.0, 0.0),
    })
}

/// Max relative deviation of the Wronskian from its base value over the checkpoints.
pub fn wronskian_drift(basis: &SolutionBasis, checkpoints: &[DiscPoint]) -> Result<f64> {
    let w0 = basis.wronskian;
    Ok(basis
        .jets_along(checkpoints, 1)?
        .iter()
        .map(|j| (SolutionBasis::wronskian_at(j) - w0).norm() / w0.norm())
        .fold(0.0, f64::max))
}

/// `max |f'' + A f|` over the samples.
pub fn residual<A, F>(a: &A, f: &F, samples: &[DiscPoint]) -> Result<f64>
where
    A: AnalyticOracle + ?Sized,
    F: AnalyticOracle + ?Sized,
{
    let fj = f.jets_along(samples, 2)?;
    let aj = a.jets_along(samples, 0)?;
    Ok(fj
        .iter()
        .zip(&aj)
        .map(|(f, a)| (f.derivative_at(2) + a.value() * f.value()).norm())
        .fold(0.0, f64::max))
}

/// Shares an oracle as a [`SharedOracle`].
pub fn share<O: AnalyticOracle + 'static>(o: O) -> SharedOracle {
    Arc::new(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{constant, re, Closed, ClosedForm, Polynomial};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pt(x: f64, y: f64) -> DiscPoint {
        DiscPoint::new(C64::new(x, y)).unwrap()
    }

    #[test]
    fn zero_coefficient_gives_linear_solution() {
        let a = constant(re(0.0));
        let s = series_solve(&a, pt(0.2, 0.1), re(0.0), re(1.0), 8).unwrap();
        assert_abs_diff_eq!((s.taylor_coefficient(1) - re(1.0)).norm(), 0.0, epsilon = 1e-16);
        assert!((2..=s.order()).all(|k| s.taylor_coefficient(k).norm() == 0.0));
        let c = continue_along(&a, &[DiscPoint::origin(), pt(0.9, 0.0)], re(0.0), re(1.0)).unwrap();
        assert_abs_diff_eq!((c.end().f0 - re(0.9)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn unit_coefficient_gives_sine() {
        let a = constant(re(1.0));
        let s = series_solve(&a, DiscPoint::origin(), re(0.0), re(1.0), 8).unwrap();
        assert_abs_diff_eq!(s.taylor_coefficient(3).re, -1.0 / 6.0, epsilon = 1e-16);
        assert_abs_diff_eq!(s.taylor_coefficient(5).re, 1.0 / 120.0, epsilon = 1e-17);
        let c = continue_along(&a, &[DiscPoint::origin(), pt(0.95, 0.0)], re(0.0), re(1.0)).unwrap();
        assert_abs_diff_eq!((c.end().f0 - re(0.95f64.sin())).norm(), 0.0, epsilon = 1e-12);
        assert!(c.pieces.len() > 2);
        let mid = pt(0.5, 0.0);
        assert_abs_diff_eq!((c.eval(&mid).unwrap().0 - re(0.5f64.sin())).norm(), 0.0, epsilon = 1e-13);
    }

    /// Brute-force solve of the undetermined-coefficients system for `f'' + p f = 0`
    /// with polynomial `p`, as a dense triangular linear system.
    fn brute_force(p: &[C64], f0: C64, f0p: C64, n: usize) -> Vec<C64> {
        let dim = n + 1;
        let mut m = nalgebra::DMatrix::<C64>::zeros(dim, dim);
        let mut rhs = nalgebra::DVector::<C64>::zeros(dim);
        m[(0, 0)] = re(1.0);
        rhs[0] = f0;
        m[(1, 1)] = re(1.0);
        rhs[1] = f0p;
        // equation for the z^k coefficient of f'' + p f, k = 0..n-2
        for k in 0..dim - 2 {
            let row = k + 2;
            m[(row, k + 2)] += re(((k + 2) * (k + 1)) as f64);
            for (j, pj) in p.iter().enumerate() {
                if j <= k {
                    m[(row, k - j)] += *pj;
                }
            }
        }
        m.lu().solve(&rhs).unwrap().iter().copied().collect()
    }

    proptest! {
        #[test]
        fn recurrence_matches_linear_system(
            coeffs in proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..=6),
            f0 in (-1.0..1.0f64, -1.0..1.0f64),
            f0p in (-1.0..1.0f64, -1.0..1.0f64),
        ) {
            let p: Vec<C64> = coeffs.into_iter().map(|(a, b)| C64::new(a, b)).collect();
            let (f0, f0p) = (C64::new(f0.0, f0.1), C64::new(f0p.0, f0p.1));
            let s = series_solve(&Closed(Polynomial(p.clone())), DiscPoint::origin(), f0, f0p, 12).unwrap();
            let bf = brute_force(&p, f0, f0p, 12);
            for k in 0..=12 {
                let c = s.taylor_coefficient(k);
                prop_assert!((c - bf[k]).norm() <= 1e-12 * (1.0 + bf[k].norm()), "k={} {} vs {}", k, c, bf[k]);
            }
        }

        #[test]
        fn linearity(lambda in -8i32..8, x in 0.0..0.8f64) {
            let a = Closed(Polynomial(vec![re(1.0), C64::new(0.5, -0.3)]));
            let z = pt(x, 0.1);
            let l = re(2f64.powi(lambda));
            let s1 = series_solve(&a, z, C64::new(0.3, 0.2), re(-0.7), 24).unwrap();
            let s2 = series_solve(&a, z, C64::new(0.3, 0.2) * l, re(-0.7) * l, 24).unwrap();
            prop_assert_eq!(s1.radius, s2.radius);
            for (u, v) in s1.series.coeffs().iter().zip(s2.series.coeffs()) {
                prop_assert_eq!(*u * l, *v);
            }
        }
    }

    struct Gamma(f64);
    impl ClosedForm for Gamma {
        fn eval<T: Taylor>(&self, at: Frame, order: usize) -> T {
            let omz = T::one_minus_variable(at, order);
            let opz = T::variable(at, order) + re(1.0);
            let q = omz * opz;
            (q.clone() * q).recip() * re(1.0 + 4.0 * self.0 * self.0)
        }
        fn validity_radius(&self, z: DiscPoint) -> f64 {
            z.one_minus().norm().min((z.value() + 1.0).norm())
        }
    }

    #[test]
    fn path_independence_and_wronskian() {
        let a = share(Closed(Gamma(1.0)));
        let target = pt(0.6, 0.5);
        let p1 = continue_along(&*a, &[DiscPoint::origin(), target], re(0.0), re(1.0)).unwrap();
        let p2 = continue_along(&*a, &[DiscPoint::origin(), pt(-0.3, 0.7), pt(0.1, -0.8), target], re(0.0), re(1.0)).unwrap();
        let (u, v) = (p1.end(), p2.end());
        assert!((u.f0 - v.f0).norm() < 1e-9 * u.f0.norm().max(1.0));
        assert!((u.f0p - v.f0p).norm() < 1e-9 * u.f0p.norm().max(1.0));

        let basis = solution_basis(a, DiscPoint::origin()).unwrap();
        let ray: Vec<_> = (1..=60).map(|k| DiscPoint::real(0.999 * k as f64 / 60.0).unwrap()).collect();
        assert!(wronskian_drift(&basis, &ray).unwrap() < 1e-10);
    }

    #[test]
    fn sine_basis_wronskian() {
        let basis = solution_basis(share(constant(re(1.0))), DiscPoint::origin()).unwrap();
        let pts: Vec<_> = (1..=50).map(|k| DiscPoint::from_polar_gap(1.0 - 0.99 * k as f64 / 50.0, 0.3 * k as f64).unwrap()).collect();
        assert!(wronskian_drift(&basis, &pts).unwrap() < 1e-11);
        let zero = solution_basis(share(constant(re(0.0))), DiscPoint::origin()).unwrap();
        assert_eq!(wronskian_drift(&zero, &pts).unwrap(), 0.0);
    }

    #[test]
    fn solution_oracle_near_the_boundary() {
        // Gamma example solution sqrt(1-z^2) sin(γ log((1+z)/(1-z))) with γ = 1/2
        let a = share(Closed(Gamma(0.5)));
        let f = SolutionOracle::new(a.clone(), DiscPoint::origin(), re(0.0), re(1.0));
        let z = DiscPoint::from_one_minus(re(1e-18)).unwrap();
        let j = f.jet(z, 2).unwrap();
        let om = 1e-18f64;
        let l = ((2.0 - om) / om).ln();
        let exact = (om * (2.0 - om)).sqrt() * (0.5 * l).sin();
        assert!((j.value().re - exact).abs() < 1e-9 * exact.abs().max(1e-9));
        let res = residual(&*a, &f, &[pt(0.3, 0.2), z]).unwrap();
        assert!(res.is_finite());
    }
}
