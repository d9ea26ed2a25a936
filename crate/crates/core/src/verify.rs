//! Numerical checks of the separation, balance, normality and growth
//! inequalities, each producing a [`VerificationReport`].

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{DiscError, Result};
use crate::hyperbolic::{hyperbolic_distance, hyperbolic_midpoint, pseudo_disc, pseudo_distance, DiscPoint};
use crate::kernel::{
    carleson_measure_estimate, circle_sup, grid_sup, spherical_derivative, weighted_sup_estimate, AnalyticOracle, CarlesonBox,
    GaugePsi, GridSpec, Jet, Shifted, SupEstimate, SupKind, Taylor,
};
use crate::locator::{count_zeros, ZeroSet};
use crate::ode::SolutionBasis;
use crate::parallel;

/// Slack allowed on every inequality that is a theorem.
pub const SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Grid-based estimates that cannot certify failure.
    Diagnostic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub verdict: Verdict,
    /// Smallest `bound side - checked side` seen (negative means violated).
    pub worst_margin: f64,
    pub worst_points: Vec<DiscPoint>,
    pub parameters: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(name: &str, verdict: Verdict, worst_margin: f64) -> Self {
        Self {
            name: name.to_string(),
            verdict,
            worst_margin,
            worst_points: Vec::new(),
            parameters: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    /// Pass or fail by the sign of the margin against `slack`.
    pub fn judged(name: &str, worst_margin: f64, slack: f64) -> Self {
        let verdict = if worst_margin >= -slack { Verdict::Pass } else { Verdict::Fail };
        let mut r = Self::new(name, verdict, worst_margin);
        r.parameters.insert("slack".into(), slack);
        r
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn at(mut self, points: Vec<DiscPoint>) -> Self {
        self.worst_points = points;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

fn scaled_psi(psi: &GaugePsi, m: f64, r_gap: f64) -> f64 {
    psi.at_gap(r_gap) / (psi.k() * m.sqrt()).max(1.0)
}

/// Lower bound `log((1 + Ψ) / (1 - Ψ))` for the hyperbolic distance between two zeros,
/// `Ψ = ψ(|t|) / max(K√M, 1)` at the hyperbolic midpoint `t`.
pub fn zero_separation_bound(psi: &GaugePsi, m: f64, z1: &DiscPoint, z2: &DiscPoint) -> f64 {
    let t = hyperbolic_midpoint(z1, z2);
    2.0 * scaled_psi(psi, m, t.boundary_gap()).atanh()
}

/// Lower bound `artanh Ψ` for the hyperbolic distance from any zero to the critical point `a`.
pub fn zero_critical_bound(psi: &GaugePsi, m: f64, a: &DiscPoint) -> f64 {
    scaled_psi(psi, m, a.boundary_gap()).atanh()
}

/// Same bound with `√(2M)` in place of `√M`, the constant the argument behind it produces.
pub fn zero_critical_bound_doubled(psi: &GaugePsi, m: f64, a: &DiscPoint) -> f64 {
    zero_critical_bound(psi, 2.0 * m, a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    ZeroCritical,
    ZeroZero,
}

/// One checked pair: a distance against its lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairBound {
    pub kind: PairKind,
    pub i: usize,
    pub j: usize,
    pub first: DiscPoint,
    pub second: DiscPoint,
    pub distance: f64,
    pub bound: f64,
}

impl PairBound {
    pub fn margin(&self) -> f64 {
        self.distance - self.bound
    }
}

/// Every zero/critical pair and every pair of distinct zeros with its bound.
pub fn separation_pairs(zeros: &ZeroSet, criticals: &ZeroSet, psi: &GaugePsi, m: f64) -> Vec<PairBound> {
    let mut jobs = Vec::new();
    for i in 0..zeros.len() {
        for j in 0..criticals.len() {
            jobs.push((PairKind::ZeroCritical, i, j));
        }
        for j in i + 1..zeros.len() {
            jobs.push((PairKind::ZeroZero, i, j));
        }
    }
    parallel::map(&jobs, |&(kind, i, j)| {
        let first = zeros.points[i];
        let (second, bound) = match kind {
            PairKind::ZeroCritical => {
                let a = criticals.points[j];
                (a, zero_critical_bound(psi, m, &a))
            }
            PairKind::ZeroZero => {
                let z = zeros.points[j];
                (z, zero_separation_bound(psi, m, &first, &z))
            }
        };
        PairBound {
            kind,
            i,
            j,
            first,
            second,
            distance: hyperbolic_distance(&first, &second),
            bound,
        }
    })
}

fn worst_pair(pairs: &[PairBound]) -> Option<&PairBound> {
    pairs.iter().fold(None, |best: Option<&PairBound>, p| match best {
        Some(b) if b.margin() <= p.margin() => Some(b),
        _ => Some(p),
    })
}

/// Checks every zero/critical pair and every zero pair against its bound.
/// No pairs at all is a vacuous pass.
pub fn verify_separation(zeros: &ZeroSet, criticals: &ZeroSet, psi: &GaugePsi, m: f64) -> VerificationReport {
    let pairs = separation_pairs(zeros, criticals, psi, m);
    let worst = worst_pair(&pairs);
    let margin = worst.map_or(f64::INFINITY, |p| p.margin());
    let mut report = VerificationReport::judged("separation", margin, SLACK)
        .param("K", psi.k())
        .param("M", m)
        .param("zeros", zeros.len() as f64)
        .param("critical_points", criticals.len() as f64);
    if let Some(p) = worst {
        report = report.at(vec![p.first, p.second]).param("worst_distance", p.distance).param("worst_bound", p.bound);
    }
    let closest = pairs
        .iter()
        .filter(|p| p.kind == PairKind::ZeroCritical)
        .map(|p| p.distance - zero_critical_bound_doubled(psi, m, &p.second))
        .fold(f64::INFINITY, f64::min);
    if closest.is_finite() {
        report = report.param("doubled_constant_margin", closest);
    }
    if pairs.is_empty() {
        report = report.note("no pairs to check");
    }
    report
}

/// `sup |A(z)| (ψ(|z|)(1 - |z|^2))^2` on the grid.
pub fn growth_constant<O: AnalyticOracle + ?Sized>(a: &O, psi: &GaugePsi, grid: &GridSpec) -> Result<SupEstimate> {
    grid_sup(grid, 0, |pts| {
        let jets = a.jets_along(pts, 0)?;
        Ok(pts
            .iter()
            .zip(&jets)
            .map(|(p, j)| {
                let w = psi.at_point(p) * p.one_minus_norm_sqr();
                j.value().norm() * w * w
            })
            .collect())
    })
}

/// Constant gauge `ψ ≡ min(1/√max(M₀, 1), 0.99)` for `M₀ = ‖A‖` with `A` in `H∞_2`.
pub fn default_gauge(a_norm: f64) -> Result<GaugePsi> {
    GaugePsi::constant((1.0 / a_norm.max(1.0).sqrt()).min(0.99))
}

/// Grid points used for the pointwise inequalities: about 7000 points out to `|z| = 1 - 2^{-10}`.
pub fn pointwise_grid() -> GridSpec {
    GridSpec::Dyadic {
        k_max: 10,
        base_angles: 8,
        angle_cap: 256,
    }
}

fn jets_over_grid<O: AnalyticOracle + ?Sized>(f: &O, grid: &GridSpec, order: usize) -> Result<Vec<(DiscPoint, Jet)>> {
    grid.validate()?;
    let level = grid.at(1);
    let rays = parallel::try_map_range(level.n_rays(), |i| {
        let ray = level.ray(i)?;
        let jets = f.jets_along(&ray.points, order)?;
        Ok(ray.points.into_iter().zip(jets).collect::<Vec<_>>())
    })?;
    Ok(rays.into_iter().flatten().collect())
}

fn worst_of(values: &[(DiscPoint, f64)]) -> (f64, Vec<DiscPoint>) {
    let mut worst = (f64::INFINITY, Vec::new());
    for (p, m) in values {
        if *m < worst.0 {
            worst = (*m, vec![*p]);
        }
    }
    worst
}

/// `(f')^# f^# ≤ |A|/4` and `(f'/f)^# ≤ |A| + 1` over the grid; returns both reports.
pub fn verify_balance<A, F>(a: &A, f: &F, grid: &GridSpec) -> Result<(VerificationReport, VerificationReport)>
where
    A: AnalyticOracle + ?Sized,
    F: AnalyticOracle + ?Sized,
{
    let fj = jets_over_grid(f, grid, 2)?;
    let pts: Vec<DiscPoint> = fj.iter().map(|(p, _)| *p).collect();
    let aj = a.jets_along(&pts, 0)?;
    let mut balance = Vec::with_capacity(pts.len());
    let mut log_derivative = Vec::with_capacity(pts.len());
    for ((p, j), av) in fj.iter().zip(&aj) {
        let (v, d1, d2) = (j.value(), j.derivative_at(1), j.derivative_at(2));
        let abs_a = av.value().norm();
        let lhs = d2.norm() / (1.0 + d1.norm_sqr()) * d1.norm() / (1.0 + v.norm_sqr());
        balance.push((*p, abs_a / 4.0 - lhs));
        // (f'/f)^# = |f'' f - f'^2| / (|f|^2 + |f'|^2)
        let log_sharp = (d2 * v - d1 * d1).norm() / (v.norm_sqr() + d1.norm_sqr());
        log_derivative.push((*p, abs_a + 1.0 - log_sharp));
    }
    let (bm, bp) = worst_of(&balance);
    let (rm, rp) = worst_of(&log_derivative);
    Ok((
        VerificationReport::judged("balance", bm, SLACK).at(bp).param("points", pts.len() as f64),
        VerificationReport::judged("log_derivative", rm, SLACK).at(rp).param("points", pts.len() as f64),
    ))
}

/// `(n, (1 - |ζ_n|^2) |f'(ζ_n)|)` with zeros ordered by increasing modulus.
pub fn normality_functional<F: AnalyticOracle + ?Sized>(f: &F, zeros: &ZeroSet) -> Result<Vec<(usize, f64)>> {
    let mut order: Vec<usize> = (0..zeros.len()).collect();
    order.sort_by(|&i, &j| zeros.points[j].boundary_gap().total_cmp(&zeros.points[i].boundary_gap()));
    let values = parallel::try_map(&order, |&i| {
        let z = zeros.points[i];
        Ok(z.one_minus_norm_sqr() * f.jet(z, 1)?.derivative_at(1).norm())
    })?;
    Ok(order.into_iter().zip(values).collect())
}

/// Smallest admissible growth exponent `√(1 + ‖S_w‖/2) + 1`.
pub fn growth_threshold(s_norm: f64) -> f64 {
    (1.0 + s_norm / 2.0).sqrt() + 1.0
}

/// Grid sup of `(1 - |z|^2)^α w^#` for the basis quotient `w = f1 / f2`, using
/// `w^# = |W| / (|f1|^2 + |f2|^2)`. `‖S_w‖` is taken as `2 ‖A‖` from the grid.
pub fn quotient_growth_check(basis: &SolutionBasis, alpha: f64, grid: &GridSpec) -> Result<VerificationReport> {
    let a_norm = weighted_sup_estimate(&**basis.a(), 2.0, grid, SupKind::Modulus)?;
    let s_norm = 2.0 * a_norm.estimate;
    let threshold = growth_threshold(s_norm);
    if !(alpha >= threshold) {
        return Err(DiscError::ExponentBelowThreshold { alpha, threshold });
    }
    let sup = quotient_growth_sup(basis, alpha, grid)?;
    let verdict = VerificationReport::new("quotient_growth", Verdict::Diagnostic, -sup.estimate);
    Ok(verdict
        .at(vec![sup.argmax])
        .param("alpha", alpha)
        .param("threshold", threshold)
        .param("s_norm", s_norm)
        .param("sup", sup.estimate)
        .param("coarse_sup", sup.coarse)
        .param("relative_change", sup.relative_change)
        .param("stable", if sup.stable { 1.0 } else { 0.0 }))
}

/// The sup behind [`quotient_growth_check`], without the threshold test.
pub fn quotient_growth_sup(basis: &SolutionBasis, alpha: f64, grid: &GridSpec) -> Result<SupEstimate> {
    grid_sup(grid, 0, |pts| {
        Ok(basis
            .jets_along(pts, 1)?
            .iter()
            .zip(pts)
            .map(|(j, p)| {
                let sharp = SolutionBasis::wronskian_at(j).norm() / (j[0].value().norm_sqr() + j[1].value().norm_sqr());
                p.one_minus_norm_sqr().powf(alpha) * sharp
            })
            .collect())
    })
}

/// Pseudo-hyperbolic radius of univalence: 1 when `‖S_w‖ ≤ 2`, else `√(2/‖S_w‖)`.
pub fn local_univalence_radius(s_norm: f64) -> f64 {
    if s_norm <= 2.0 {
        1.0
    } else {
        (2.0 / s_norm).sqrt()
    }
}

/// Largest number of preimages in `Δ_p(a, δ)` over `w(p)` for five sample points `p`
/// inside the disc; 1 when `w` is injective there.
pub fn univalence_spot_check<W: AnalyticOracle + ?Sized>(w: &W, a: &DiscPoint, delta: f64) -> Result<u32> {
    let (c, r) = pseudo_disc(a, delta);
    let center = DiscPoint::new(c)?;
    let samples: Vec<DiscPoint> = std::iter::once(Ok(*a))
        .chain((0..4).map(|k| {
            let t = std::f64::consts::FRAC_PI_2 * k as f64 + 0.3;
            center.offset(num_complex::Complex64::from_polar(0.6 * r, t))
        }))
        .collect::<Result<_>>()?;
    let counts = parallel::try_map(&samples, |p| {
        let w0 = w.jet(*p, 0)?.value();
        count_zeros(&Shifted(w, w0), center, r)
    })?;
    Ok(counts.into_iter().max().unwrap_or(0))
}

/// Result of [`coefficient_growth_margin`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthMargin {
    /// `None` when the grid values keep growing under refinement.
    pub c: Option<f64>,
    pub estimate: f64,
    pub coarse: f64,
    pub argmax: DiscPoint,
}

/// The same grid pushed further towards the boundary: two more dyadic radii,
/// or the outer gap of a polar grid quartered.
pub fn extended(grid: &GridSpec) -> GridSpec {
    match *grid {
        GridSpec::Dyadic {
            k_max,
            base_angles,
            angle_cap,
        } => GridSpec::Dyadic {
            k_max: k_max + 2,
            base_angles,
            angle_cap,
        },
        GridSpec::Polar { r_max, n_radii, n_angles } => GridSpec::Polar {
            r_max: 1.0 - (1.0 - r_max) / 4.0,
            n_radii,
            n_angles,
        },
    }
}

/// Smallest `C ≥ 0` with `(1 - |z|^2)^2 |A| ≤ 1 + C (1 - |z|)` on the grid, if it
/// settles when the grid is [`extended`].
pub fn coefficient_growth_margin<O: AnalyticOracle + ?Sized>(a: &O, grid: &GridSpec) -> Result<GrowthMargin> {
    let margin_sup = |g: &GridSpec| {
        grid_sup(g, 0, |pts| {
            let jets = a.jets_along(pts, 0)?;
            Ok(pts
                .iter()
                .zip(&jets)
                .map(|(p, j)| {
                    let w = p.one_minus_norm_sqr();
                    (w * w * j.value().norm() - 1.0) / p.boundary_gap()
                })
                .collect())
        })
    };
    let coarse = margin_sup(grid)?;
    let sup = margin_sup(&extended(grid))?;
    let (fine, coarse) = (sup.estimate.max(0.0), coarse.estimate.max(0.0));
    let settled = fine == coarse || (fine - coarse).abs() <= crate::kernel::grid::STABILITY * fine;
    Ok(GrowthMargin {
        c: settled.then_some(fine),
        estimate: fine,
        coarse,
        argmax: sup.argmax,
    })
}

/// Largest `δ` with `ρ_p(ζ1, ζ2) ≥ δ max((1 - |ζ1|^2)^{α-1}, (1 - |ζ2|^2)^{α-1})` over all cross
/// pairs. A coincident pair (fitted `δ = 0`) fails; otherwise the report is diagnostic.
pub fn cross_zero_separation(zeros1: &ZeroSet, zeros2: &ZeroSet, delta: Option<f64>, alpha: f64) -> VerificationReport {
    let mut best = (f64::INFINITY, Vec::new());
    for z1 in &zeros1.points {
        for z2 in &zeros2.points {
            let w = z1.one_minus_norm_sqr().max(z2.one_minus_norm_sqr()).powf(alpha - 1.0);
            let w = if alpha >= 1.0 { w } else { z1.one_minus_norm_sqr().min(z2.one_minus_norm_sqr()).powf(alpha - 1.0) };
            let fit = pseudo_distance(z1, z2) / w;
            if fit < best.0 {
                best = (fit, vec![*z1, *z2]);
            }
        }
    }
    let fitted = best.0;
    let verdict = if fitted <= 0.0 { Verdict::Fail } else { Verdict::Diagnostic };
    let mut r = VerificationReport::new("cross_zero_separation", verdict, fitted).at(best.1).param("alpha", alpha);
    if fitted.is_finite() {
        r = r.param("fitted_delta", fitted);
    }
    if let Some(d) = delta {
        r = r.param("delta", d).param("delta_consistent", if fitted >= d { 1.0 } else { 0.0 });
    }
    r
}

/// Carleson-box ratio of `|A|^2 (1 - |z|^2)^3` at `levels` and `levels + 1`.
pub fn carleson_diagnostic<O: AnalyticOracle + ?Sized>(a: &O, levels: u32) -> Result<VerificationReport> {
    let coarse = carleson_measure_estimate(a, &CarlesonBox::dyadic_family(levels))?;
    let fine = carleson_measure_estimate(a, &CarlesonBox::dyadic_family(levels + 1))?;
    let change = if fine == coarse { 0.0 } else { (fine - coarse).abs() / fine.abs() };
    Ok(VerificationReport::new("carleson", Verdict::Diagnostic, -fine)
        .param("estimate", fine)
        .param("coarse", coarse)
        .param("relative_change", change))
}

/// `sup_{|z| = 1 - gap} (1 - |z|^2) w^#` on `n` points.
pub fn normality_gauge_on_circle<W: AnalyticOracle + ?Sized>(w: &W, gap: f64, n: usize) -> Result<(f64, DiscPoint)> {
    circle_sup(gap, n, |z| Ok(z.one_minus_norm_sqr() * spherical_derivative(w, z)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{example_blaschke_quotient, example_gamma};
    use crate::hyperbolic::C64;
    use crate::kernel::{constant, BlaschkeProduct, Polynomial, Closed};
    use crate::locator::real_axis_scan;
    use crate::ode::{share, solution_basis, OdeSettings};
    use approx::assert_abs_diff_eq;

    fn set(points: Vec<DiscPoint>) -> ZeroSet {
        let n = points.len();
        ZeroSet {
            points,
            multiplicities: vec![1; n],
            center: DiscPoint::origin(),
            radius: 1.0,
            certified_count: n as u32,
        }
    }

    #[test]
    fn bound_formulas() {
        let c = 0.3;
        let psi = GaugePsi::constant(c).unwrap();
        let z1 = DiscPoint::real(0.2).unwrap();
        let z2 = DiscPoint::real(-0.4).unwrap();
        assert_abs_diff_eq!(zero_separation_bound(&psi, 1.0 / (c * c), &z1, &z2), ((1.0 + c * c) / (1.0 - c * c)).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(zero_separation_bound(&psi, 1.0, &z1, &z2), ((1.0 + c) / (1.0 - c)).ln(), epsilon = 1e-14);
        let g = GaugePsi::constant(1.0 / 5f64.sqrt()).unwrap();
        assert_abs_diff_eq!(zero_critical_bound(&g, 1.0, &z1), 0.481212, epsilon = 1e-6);
        assert_abs_diff_eq!(zero_separation_bound(&g, 1.0, &z1, &z2), 0.962424, epsilon = 1e-6);
    }

    #[test]
    fn q_gauge_bound_asymptotics() {
        let q = 2.0;
        let psi = GaugePsi::log_power(q).unwrap();
        for n in [50.0f64, 400.0] {
            let zeta = DiscPoint::from_one_minus(C64::new((1.0 - ((n + 1.0) * std::f64::consts::PI).sqrt()).exp(), 0.0)).unwrap();
            let b = zero_critical_bound(&psi, 1.0, &zeta) * (psi.k()).max(1.0);
            let predicted = 0.5 * (n * std::f64::consts::PI).powf(1.0 / q - 1.0);
            assert!((b / predicted - 1.0).abs() < 2.0 / n.sqrt(), "{b} {predicted}");
        }
    }

    #[test]
    fn separation_on_gamma_one() {
        let ex = example_gamma(1.0).unwrap();
        let end = DiscPoint::real(0.9999).unwrap();
        let (f0, f0p) = ex.bundle.initial.unwrap();
        let scan = real_axis_scan(&*ex.bundle.a, f0.re, f0p.re, end, &OdeSettings::default()).unwrap();
        let back = real_axis_scan(&*ex.bundle.a, f0.re, -f0p.re, end, &OdeSettings::default()).unwrap();
        let mut zeros = scan.zeros.points.clone();
        zeros.extend(back.zeros.points.iter().filter(|z| z.norm() > 0.0).map(|z| z.reflected()));
        let mut crit = scan.critical.points.clone();
        crit.extend(back.critical.points.iter().map(|z| z.reflected()));
        let m0 = ex.coefficient_norm();
        let psi = default_gauge(m0).unwrap();
        let m = psi.at_gap(1.0).powi(2) * m0;
        assert_abs_diff_eq!(m, 1.0, epsilon = 1e-14);
        let r = verify_separation(&set(zeros), &set(crit), &psi, m);
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        let d = r.parameters["worst_distance"];
        assert!(d > 0.4812 && d < std::f64::consts::FRAC_PI_4 + 1e-9, "{d}");
    }

    #[test]
    fn empty_critical_set_passes() {
        let psi = GaugePsi::constant(0.5).unwrap();
        let r = verify_separation(&set(vec![DiscPoint::real(0.1).unwrap()]), &set(vec![]), &psi, 1.0);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.worst_margin, f64::INFINITY);
    }

    #[test]
    fn separation_flags_close_pair() {
        let psi = GaugePsi::constant(0.5).unwrap();
        let z = set(vec![DiscPoint::real(0.1).unwrap()]);
        let a = set(vec![DiscPoint::real(0.15).unwrap()]);
        let r = verify_separation(&z, &a, &psi, 1.0);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.worst_points.len(), 2);
    }

    #[test]
    fn balance_on_gamma_basis() {
        let ex = example_gamma(1.0).unwrap();
        let basis = solution_basis(ex.bundle.a.clone(), DiscPoint::origin()).unwrap();
        let grid = pointwise_grid();
        for f in [&basis.f1, &basis.f2] {
            let (b, r) = verify_balance(&*ex.bundle.a, f, &grid).unwrap();
            assert_eq!(b.verdict, Verdict::Pass, "{b:?}");
            assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
            assert!(b.parameters["points"] > 5000.0);
        }
    }

    #[test]
    fn balance_is_tight_at_zeros() {
        // f(ζ) = 0 forces f''(ζ) = 0, so the margin there is exactly |A(ζ)|/4
        let ex = example_gamma(1.0).unwrap();
        let z = ex.zero(1);
        let j = ex.bundle.f.jet(z, 2).unwrap();
        assert!(j.value().norm() < 1e-12 && j.derivative_at(2).norm() < 1e-9);
    }

    #[test]
    fn normality_functional_gamma() {
        let g = 1.5;
        let ex = example_gamma(g).unwrap();
        let zeros = set((1..=4).map(|n| ex.zero(n)).collect());
        let vals = normality_functional(&*ex.bundle.f, &zeros).unwrap();
        let mut prev = f64::INFINITY;
        for (i, v) in vals {
            let z = zeros.points[i];
            assert_abs_diff_eq!(v, 2.0 * g * z.one_minus_norm_sqr().sqrt(), epsilon = 1e-12);
            assert!(v < prev);
            prev = v;
        }
        assert!(normality_functional(&*ex.bundle.f, &set(vec![])).unwrap().is_empty());
    }

    #[test]
    fn growth_threshold_values() {
        assert_abs_diff_eq!(growth_threshold(2.0), 2f64.sqrt() + 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(growth_threshold(10.0), 3.449490, epsilon = 1e-6);
    }

    #[test]
    fn quotient_growth_rejects_low_exponent() {
        let basis = solution_basis(share(constant(C64::new(1.0, 0.0))), DiscPoint::origin()).unwrap();
        let grid = GridSpec::Polar { r_max: 0.9, n_radii: 8, n_angles: 16 };
        match quotient_growth_check(&basis, 2.0, &grid) {
            Err(DiscError::ExponentBelowThreshold { threshold, .. }) => assert!(threshold > 2.0),
            other => panic!("{other:?}"),
        }
        let r = quotient_growth_check(&basis, 3.0, &grid).unwrap();
        assert_eq!(r.verdict, Verdict::Diagnostic);
    }

    #[test]
    fn quotient_growth_moebius_and_monotone() {
        // A ≡ 0: w = z, w^# ≤ 1
        let basis = solution_basis(share(constant(C64::new(0.0, 0.0))), DiscPoint::origin()).unwrap();
        let grid = GridSpec::Dyadic { k_max: 8, base_angles: 8, angle_cap: 64 };
        let r = quotient_growth_check(&basis, 2.0, &grid).unwrap();
        assert!(r.parameters["sup"] <= 1.0 + 1e-12);
        let lo = quotient_growth_sup(&basis, 2.5, &grid).unwrap();
        assert!(lo.estimate <= r.parameters["sup"]);
    }

    #[test]
    fn univalence_radius() {
        assert_eq!(local_univalence_radius(2.0), 1.0);
        assert_eq!(local_univalence_radius(0.0), 1.0);
        assert_abs_diff_eq!(local_univalence_radius(8.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn univalence_spot_check_on_square() {
        // w = z^2 has S_w = -3/(2z^2): injective on small discs away from 0, not on ones around 0
        let w = Closed(Polynomial(vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]));
        assert_eq!(univalence_spot_check(&w, &DiscPoint::real(0.5).unwrap(), 0.3).unwrap(), 1);
        assert_eq!(univalence_spot_check(&w, &DiscPoint::real(0.05).unwrap(), 0.5).unwrap(), 2);
    }

    #[test]
    fn growth_margin_cases() {
        let grid = GridSpec::Dyadic { k_max: 10, base_angles: 8, angle_cap: 64 };
        for c in [0.0, 1.0] {
            let m = coefficient_growth_margin(&constant(C64::new(c, 0.0)), &grid).unwrap();
            assert_eq!(m.c, Some(0.0));
        }
        let ex = example_gamma(1.0).unwrap();
        let m = coefficient_growth_margin(&*ex.bundle.a, &grid).unwrap();
        assert_eq!(m.c, None, "{m:?}");
        assert!(m.estimate > 1000.0);
    }

    #[test]
    fn cross_separation_cases() {
        let a = set(vec![DiscPoint::real(0.5).unwrap()]);
        let b = set(vec![DiscPoint::real(-0.5).unwrap()]);
        let r = cross_zero_separation(&a, &b, Some(0.1), 4.0);
        assert_eq!(r.verdict, Verdict::Diagnostic);
        assert!(r.parameters["fitted_delta"] > 0.8);
        assert_eq!(r.parameters["delta_consistent"], 1.0);
        let r = cross_zero_separation(&a, &a, None, 4.0);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.worst_margin, 0.0);
    }

    #[test]
    fn carleson_for_constants() {
        let zero = carleson_diagnostic(&constant(C64::new(0.0, 0.0)), 3).unwrap();
        assert_eq!(zero.parameters["estimate"], 0.0);
        let one = carleson_diagnostic(&constant(C64::new(1.0, 0.0)), 3).unwrap();
        assert!(one.parameters["estimate"] > 0.0 && one.parameters["relative_change"] < 0.05, "{one:?}");
    }

    #[test]
    fn quotient_example_separation() {
        let b = BlaschkeProduct::new(vec![DiscPoint::real(0.5).unwrap(), DiscPoint::real(-0.5).unwrap()]).unwrap();
        let ex = example_blaschke_quotient(b).unwrap();
        let crit = crate::locator::locate_critical_points(ex.f.clone(), DiscPoint::origin(), 0.9, 1e-12).unwrap();
        assert!(crit.points.iter().any(|p| p.norm() < 1e-10));
        let grid = GridSpec::Dyadic { k_max: 10, base_angles: 16, angle_cap: 1024 };
        let m0 = weighted_sup_estimate(&*ex.a, 2.0, &grid, SupKind::Modulus).unwrap().estimate;
        let psi = default_gauge(m0).unwrap();
        let m = growth_constant(&*ex.a, &psi, &grid).unwrap().estimate;
        // f has no zeros, so only the vacuous check remains
        assert!(verify_separation(&ZeroSet::empty(DiscPoint::origin(), 0.9), &crit, &psi, m).passed());
    }
}
