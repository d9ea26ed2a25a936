//! Zero and critical-point location: argument-principle counts, a polar
//! quadtree with Newton polishing, and sign-change scans along the real axis.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{DiscError, Result};
use crate::hyperbolic::{difference, DiscPoint, C64};
use crate::kernel::{AnalyticOracle, Derivative, Frame, Taylor};
use crate::ode::{advance, solve_local, LocalSolution, OdeSettings};
use crate::parallel;

/// Zeros found in the disc `{|z - center| < radius}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSet {
    pub points: Vec<DiscPoint>,
    pub multiplicities: Vec<u32>,
    pub center: DiscPoint,
    pub radius: f64,
    /// Count from the enclosing contour.
    pub certified_count: u32,
}

impl ZeroSet {
    pub fn empty(center: DiscPoint, radius: f64) -> Self {
        Self {
            points: Vec::new(),
            multiplicities: Vec::new(),
            center,
            radius,
            certified_count: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `|f|` below this fraction of the contour scale counts as a zero on the contour.
pub const CONTOUR_GUARD: f64 = 1e-9;
const NODES_START: usize = 256;
const NODES_MAX: usize = 1 << 16;
const SEAM: f64 = 0.618_033_988_749_894_9;

fn circle_node(center: &DiscPoint, radius: f64, j: usize, n: usize) -> Result<DiscPoint> {
    center.offset(C64::from_polar(radius, TAU * j as f64 / n as f64))
}

fn trapezoid_winding<O: AnalyticOracle + ?Sized>(f: &O, center: &DiscPoint, radius: f64, n: usize) -> Result<f64> {
    let nodes: Vec<DiscPoint> = (0..n).map(|j| circle_node(center, radius, j, n)).collect::<Result<_>>()?;
    let jets = f.jets_along(&nodes, 1)?;
    let scale = jets.iter().map(|j| j.value().norm()).fold(0.0, f64::max);
    let mut sum = C64::new(0.0, 0.0);
    for (j, (p, jet)) in nodes.iter().zip(&jets).enumerate() {
        let v = jet.value();
        if v.norm() <= CONTOUR_GUARD * scale {
            return Err(DiscError::ZeroOnContour(p.value()));
        }
        sum += jet.derivative_at(1) / v * C64::from_polar(1.0, TAU * j as f64 / n as f64);
    }
    Ok((sum * radius / n as f64).re)
}

/// Number of zeros (with multiplicity) inside `|z - center| < radius`.
pub fn count_zeros<O: AnalyticOracle + ?Sized>(f: &O, center: DiscPoint, radius: f64) -> Result<u32> {
    if !(radius > 0.0) || radius >= center.boundary_gap() {
        return Err(DiscError::InvalidArgument(format!(
            "circle of radius {radius} about {} leaves the disc",
            center.value()
        )));
    }
    let mut n = NODES_START;
    let mut prev = trapezoid_winding(f, &center, radius, n)?;
    loop {
        n *= 2;
        let w = trapezoid_winding(f, &center, radius, n)?;
        let settled = (w - prev).abs() < 0.05;
        prev = w;
        if settled || n >= NODES_MAX {
            break;
        }
    }
    let k = prev.round();
    if (prev - k).abs() > 0.1 || k < 0.0 {
        return Err(DiscError::NonIntegerWinding(prev));
    }
    Ok(k as u32)
}

/// [`count_zeros`], retrying at radii 3% larger and smaller when a zero sits on the contour.
/// Returns the radius actually used.
pub fn count_zeros_perturbed<O: AnalyticOracle + ?Sized>(f: &O, center: DiscPoint, radius: f64) -> Result<(u32, f64)> {
    let mut last = None;
    for r in [radius, radius * 1.03, radius * 0.97] {
        if r >= center.boundary_gap() {
            continue;
        }
        match count_zeros(f, center, r) {
            Ok(k) => return Ok((k, r)),
            Err(e @ DiscError::ZeroOnContour(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(DiscError::InvalidArgument("no admissible radius".into())))
}

/// Polar cell `{center + ρ e^{iθ} : ρ0 ≤ ρ ≤ ρ1, θ0 ≤ θ ≤ θ1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarCell {
    pub center: DiscPoint,
    pub rho: (f64, f64),
    pub theta: (f64, f64),
}

impl PolarCell {
    /// The whole disc. The angular seam is placed off the real and imaginary
    /// axes, where symmetric functions tend to put their zeros.
    pub fn disc(center: DiscPoint, radius: f64) -> Self {
        Self {
            center,
            rho: (0.0, radius),
            theta: (SEAM, SEAM + TAU),
        }
    }

    fn at(&self, rho: f64, theta: f64) -> Result<DiscPoint> {
        self.center.offset(C64::from_polar(rho, theta))
    }

    fn full_turn(&self) -> bool {
        self.theta.1 - self.theta.0 >= TAU
    }

    /// Point in the middle of the cell.
    pub fn middle(&self) -> Result<DiscPoint> {
        if self.rho.0 == 0.0 && self.full_turn() {
            return Ok(self.center);
        }
        self.at(0.5 * (self.rho.0 + self.rho.1), 0.5 * (self.theta.0 + self.theta.1))
    }

    pub fn diameter(&self) -> f64 {
        let dr = self.rho.1 - self.rho.0;
        let arc = self.rho.1 * (self.theta.1 - self.theta.0).min(PI);
        dr.max(arc).max(if self.full_turn() { 2.0 * self.rho.1 } else { 0.0 })
    }

    pub fn contains(&self, z: &DiscPoint) -> bool {
        let d = difference(z, &self.center);
        let r = d.norm();
        if r < self.rho.0 || r > self.rho.1 {
            return false;
        }
        if self.full_turn() {
            return true;
        }
        let t = (d.arg() - self.theta.0).rem_euclid(TAU);
        t <= self.theta.1 - self.theta.0
    }

    /// Children split at the given fractions of the radial and angular ranges.
    /// A full turn keeps its inner part whole, so a zero at the center never
    /// lands on a child's boundary; only the outer ring is cut into sectors.
    pub fn split(&self, fr: f64, ft: f64) -> Vec<PolarCell> {
        let rm = self.rho.0 + fr * (self.rho.1 - self.rho.0);
        let tm = self.theta.0 + ft * (self.theta.1 - self.theta.0);
        let c = self.center;
        let outer = [
            PolarCell { center: c, rho: (rm, self.rho.1), theta: (self.theta.0, tm) },
            PolarCell { center: c, rho: (rm, self.rho.1), theta: (tm, self.theta.1) },
        ];
        if self.full_turn() {
            let inner = PolarCell { center: c, rho: (self.rho.0, rm), theta: self.theta };
            return [inner].into_iter().chain(outer).collect();
        }
        vec![
            PolarCell { center: c, rho: (self.rho.0, rm), theta: (self.theta.0, tm) },
            PolarCell { center: c, rho: (self.rho.0, rm), theta: (tm, self.theta.1) },
            outer[0],
            outer[1],
        ]
    }

    /// Boundary as closed loops of `(ρ, θ)` edges, positively oriented.
    /// A full-turn annulus has two loops; every other cell has one.
    fn loops(&self) -> Vec<Vec<Edge>> {
        let (r0, r1) = self.rho;
        let (t0, t1) = self.theta;
        let outer = ((r1, t0), (r1, t1));
        if self.full_turn() {
            let mut l = vec![vec![outer]];
            if r0 > 0.0 {
                l.push(vec![((r0, t1), (r0, t0))]);
            }
            return l;
        }
        let mut e = vec![outer, ((r1, t1), (r0, t1))];
        if r0 > 0.0 {
            e.push(((r0, t1), (r0, t0)));
        }
        e.push(((r0, t0), (r1, t0)));
        vec![e]
    }
}

type Edge = ((f64, f64), (f64, f64));

const EDGE_SAMPLES: usize = 24;
const MAX_PHASE_STEP: f64 = PI / 6.0;
const MAX_BISECTIONS: usize = 40_000;

/// Winding number of `f` around the cell boundary, by continuous phase tracking.
pub fn cell_winding<O: AnalyticOracle + ?Sized>(f: &O, cell: &PolarCell) -> Result<i64> {
    let lerp = |e: &Edge, s: f64| (e.0 .0 + s * (e.1 .0 - e.0 .0), e.0 .1 + s * (e.1 .1 - e.0 .1));
    let loops = cell.loops();
    // (loop, edge, parameter) for every sample
    let mut samples: Vec<(usize, usize, f64)> = Vec::new();
    let mut pts = Vec::new();
    for (l, edges) in loops.iter().enumerate() {
        for (k, e) in edges.iter().enumerate() {
            for i in 0..EDGE_SAMPLES {
                let s = i as f64 / EDGE_SAMPLES as f64;
                let (r, t) = lerp(e, s);
                pts.push(cell.at(r, t)?);
                samples.push((l, k, s));
            }
        }
    }
    let vals: Vec<C64> = f.jets_along(&pts, 0)?.iter().map(|j| j.value()).collect();
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let guard = CONTOUR_GUARD * scale;
    let check = |v: C64, p: &DiscPoint| -> Result<()> {
        if v.norm() <= guard {
            Err(DiscError::ZeroOnContour(p.value()))
        } else {
            Ok(())
        }
    };
    for (v, p) in vals.iter().zip(&pts) {
        check(*v, p)?;
    }
    let mut total = 0.0;
    let mut budget = MAX_BISECTIONS;
    let mut start = 0;
    while start < samples.len() {
        let l = samples[start].0;
        let n = samples[start..].iter().take_while(|s| s.0 == l).count();
        for i in 0..n {
            let (_, ka, sa) = samples[start + i];
            let j = (i + 1) % n;
            let (_, kb, sb) = samples[start + j];
            // the last sample of an edge runs to the edge's end, which is where the next one starts
            let end_s = if kb == ka && j != 0 { sb } else { 1.0 };
            let mut stack = vec![(sa, vals[start + i], end_s, vals[start + j])];
            while let Some((s0, v0, s1, v1)) = stack.pop() {
                let dphi = (v1 / v0).arg();
                if dphi.abs() <= MAX_PHASE_STEP {
                    total += dphi;
                    continue;
                }
                if budget == 0 || (s1 - s0) < 1e-13 {
                    let (r, t) = lerp(&loops[l][ka], s0);
                    return Err(DiscError::ZeroOnContour(cell.at(r, t)?.value()));
                }
                budget -= 1;
                let sm = 0.5 * (s0 + s1);
                let (r, t) = lerp(&loops[l][ka], sm);
                let p = cell.at(r, t)?;
                let vm = f.value(p)?;
                check(vm, &p)?;
                stack.push((sm, vm, s1, v1));
                stack.push((s0, v0, sm, vm));
            }
        }
        start += n;
    }
    Ok((total / TAU).round() as i64)
}

/// Order of vanishing of a Taylor expansion: the first coefficient above
/// `1e-8` times the largest one.
pub fn multiplicity_of<T: Taylor>(s: &T) -> Result<u32> {
    let scale = s.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(DiscError::Degenerate(s.center().value()));
    }
    s.coeffs()
        .iter()
        .position(|c| c.norm() > 1e-8 * scale)
        .map(|k| k as u32)
        .ok_or(DiscError::Degenerate(s.center().value()))
}

/// Multiplicity of the zero of `f` at `z`, from an expansion scaled to the local analyticity radius.
pub fn multiplicity<O: AnalyticOracle + ?Sized>(f: &O, z: DiscPoint) -> Result<u32> {
    let scale = 0.25 * f.validity_radius(z).min(z.boundary_gap());
    multiplicity_of(&f.series(Frame::new(z, scale), 8)?)
}

/// Tuning for [`locate_zeros`].
const NEWTON_ITERS: usize = 50;
const SPLITS: [f64; 5] = [0.5, 0.46, 0.54, 0.42, 0.58];
const MAX_DEPTH: usize = 48;

fn newton<O: AnalyticOracle + ?Sized>(f: &O, start: DiscPoint, m: u32, tol: f64) -> Result<DiscPoint> {
    let mut z = start;
    let mut last = f64::INFINITY;
    for _ in 0..NEWTON_ITERS {
        let j = f.jet(z, 1)?;
        let d = j.derivative_at(1);
        if j.value().norm() == 0.0 {
            return Ok(z);
        }
        if d.norm() == 0.0 {
            return Err(DiscError::NewtonFailure(start.value()));
        }
        let step = -j.value() / d * m as f64;
        // a multiple zero is only resolved to about eps^(1/m); stop once steps stop shrinking
        if m > 1 && step.norm() >= last && step.norm() < attainable(m) {
            return Ok(z);
        }
        z = z.offset(step).map_err(|_| DiscError::NewtonFailure(start.value()))?;
        if step.norm() <= 1e-3 * tol || step.norm() <= 1e-15 * z.boundary_gap() {
            return Ok(z);
        }
        last = step.norm();
    }
    if m > 1 && last < attainable(m) {
        return Ok(z);
    }
    Err(DiscError::NewtonFailure(start.value()))
}

/// Rough accuracy to which a zero of multiplicity `m` can be located.
fn attainable(m: u32) -> f64 {
    10.0 * 1e-15f64.powf(1.0 / m as f64)
}

fn certify<O: AnalyticOracle + ?Sized>(f: &O, z: DiscPoint, m: u32, tol: f64) -> Result<bool> {
    let mut r = tol.max(attainable(m));
    for _ in 0..4 {
        if r >= 0.5 * z.boundary_gap() {
            r = 0.25 * z.boundary_gap();
        }
        match count_zeros(f, z, r) {
            Ok(k) => return Ok(k == m),
            Err(DiscError::ZeroOnContour(_)) | Err(DiscError::NonIntegerWinding(_)) => r *= 10.0,
            Err(e) => return Err(e),
        }
    }
    Ok(false)
}

fn search<O: AnalyticOracle + ?Sized>(f: &O, cell: PolarCell, count: i64, tol: f64, depth: usize) -> Result<Vec<(DiscPoint, u32)>> {
    if count <= 0 {
        return Ok(Vec::new());
    }
    let small = cell.diameter() < 10.0 * tol.max(attainable(count as u32)) || depth >= MAX_DEPTH;
    if count == 1 || small || cell.diameter() < 0.05 {
        let m = count as u32;
        if let Ok(z) = newton(f, cell.middle()?, m, tol) {
            let residual_ok = {
                let j = f.jet(z, 1)?;
                m > 1 || j.value().norm() < tol * j.derivative_at(1).norm().max(1.0)
            };
            if (cell.contains(&z) || small) && residual_ok && certify(f, z, m, tol)? {
                return Ok(vec![(z, m)]);
            }
        }
        if small {
            return Err(DiscError::NewtonFailure(cell.middle()?.value()));
        }
    }
    for (i, &fr) in SPLITS.iter().enumerate() {
        let ft = SPLITS[(i + 2) % SPLITS.len()];
        let children = cell.split(fr, ft);
        let counts: Result<Vec<i64>> = children.iter().map(|c| cell_winding(f, c)).collect();
        let counts = match counts {
            Ok(c) if c.iter().sum::<i64>() == count && c.iter().all(|k| *k >= 0) => c,
            Ok(_) | Err(DiscError::ZeroOnContour(_)) => continue,
            Err(e) => return Err(e),
        };
        let jobs: Vec<(PolarCell, i64)> = children.into_iter().zip(counts).collect();
        let found = parallel::try_map(&jobs, |(c, k)| search(f, *c, *k, tol, depth + 1))?;
        return Ok(found.into_iter().flatten().collect());
    }
    Err(DiscError::NewtonFailure(cell.middle()?.value()))
}

/// All zeros in `|z - center| < radius`, each polished to `tol` and re-certified.
pub fn locate_zeros<O: AnalyticOracle + ?Sized>(f: &O, center: DiscPoint, radius: f64, tol: f64) -> Result<ZeroSet> {
    let (total, radius) = count_zeros_perturbed(f, center, radius)?;
    let found = search(f, PolarCell::disc(center, radius), total as i64, tol, 0)?;
    let mut merged: Vec<(DiscPoint, u32)> = Vec::new();
    for (z, m) in found {
        if !merged.iter().any(|(w, _)| difference(w, &z).norm() < tol) {
            merged.push((z, m));
        }
    }
    let sum: u32 = merged.iter().map(|(_, m)| m).sum();
    if sum != total {
        return Err(DiscError::NonIntegerWinding(sum as f64));
    }
    Ok(ZeroSet {
        points: merged.iter().map(|(z, _)| *z).collect(),
        multiplicities: merged.iter().map(|(_, m)| *m).collect(),
        center,
        radius,
        certified_count: total,
    })
}

/// Zeros of `f'`.
pub fn locate_critical_points<O: AnalyticOracle>(f: O, center: DiscPoint, radius: f64, tol: f64) -> Result<ZeroSet> {
    locate_zeros(&Derivative(f), center, radius, tol)
}

/// Zeros and critical points of a real solution along a segment of the real axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealScan {
    pub zeros: ZeroSet,
    pub critical: ZeroSet,
}

const SCAN_SAMPLES: usize = 32;

fn poly_eval(c: &[C64], t: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for ck in c.iter().rev() {
        d = d * t + v;
        v = v * t + ck.re;
    }
    (v, d)
}

/// Root of the real polynomial (or its derivative) in `(a, b)` with a sign change.
fn bracketed_root(c: &[C64], deriv: bool, mut a: f64, mut b: f64) -> f64 {
    let g = |t: f64| {
        let (v, d) = poly_eval(c, t);
        if deriv {
            d
        } else {
            v
        }
    };
    let mut ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn derivative_coeffs(c: &[C64]) -> Vec<C64> {
    c.iter().enumerate().skip(1).map(|(k, v)| v * k as f64).collect()
}

/// Scans the solution with real data `(f0, f0p)` at the origin along `[0, end]`
/// (`end` real, either sign), bracketing sign changes of `f` and `f'` inside
/// each local power series.
pub fn real_axis_scan<O: AnalyticOracle + ?Sized>(a: &O, f0: f64, f0p: f64, end: DiscPoint, st: &OdeSettings) -> Result<RealScan> {
    if end.value().im != 0.0 {
        return Err(DiscError::InvalidArgument("scan end must be real".into()));
    }
    let sign = if end.value().re >= 0.0 { 1.0 } else { -1.0 };
    let origin = DiscPoint::origin();
    let mut cur = solve_local(a, origin, &[(C64::new(f0, 0.0), C64::new(f0p, 0.0))], 0, st)?;
    let mut zeros = Vec::new();
    let mut crit = Vec::new();
    if f0 == 0.0 {
        zeros.push(origin);
    }
    if f0p == 0.0 {
        crit.push(origin);
    }
    loop {
        let piece: &LocalSolution = &cur[0];
        let c = piece.center();
        let coeffs = piece.series.coeffs();
        let scale = coeffs.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let im = coeffs.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        if im > 1e-8 * scale {
            return Err(DiscError::NotReal(c.value()));
        }
        let rem = difference(&end, &c).re * sign;
        let reach = st.step_fraction * piece.radius;
        let (t_end, done) = if rem <= reach { (rem / piece.radius, true) } else { (reach / piece.radius, false) };
        let dc = derivative_coeffs(coeffs);
        for (deriv, out) in [(false, &mut zeros), (true, &mut crit)] {
            let poly: &[C64] = if deriv { &dc } else { coeffs };
            let mut prev_t = 0.0;
            let mut prev = poly_eval(poly, 0.0).0;
            for i in 1..=SCAN_SAMPLES {
                let t = t_end * i as f64 / SCAN_SAMPLES as f64;
                let v = poly_eval(poly, sign * t).0;
                if v == 0.0 {
                    out.push(c.offset(C64::new(sign * t * piece.radius, 0.0))?);
                } else if prev != 0.0 && (v < 0.0) != (prev < 0.0) {
                    let (lo, hi) = (sign * prev_t, sign * t);
                    let root = bracketed_root(coeffs, deriv, lo.min(hi), lo.max(hi));
                    out.push(c.offset(C64::new(root * piece.radius, 0.0))?);
                }
                prev = v;
                prev_t = t;
            }
        }
        if done {
            break;
        }
        let target = c.offset(C64::new(sign * reach, 0.0))?;
        cur = advance(a, cur, target, st, None)?;
    }
    let radius = end.norm();
    let mk = |pts: Vec<DiscPoint>| ZeroSet {
        multiplicities: vec![1; pts.len()],
        certified_count: pts.len() as u32,
        points: pts,
        center: origin,
        radius,
    };
    Ok(RealScan {
        zeros: mk(zeros),
        critical: mk(crit),
    })
}
