//! Runs the named checks against a prepared scenario.

use anyhow::{bail, Context, Result};
use disc_osc::constructions::{lappan_function, standard_residual_grid};
use disc_osc::hyperbolic::pseudo_disc;
use disc_osc::kernel::{weighted_sup_estimate, GaugePsi, Schwarzian, SupKind};
use disc_osc::locator::{count_zeros, locate_zeros};
use disc_osc::ode::wronskian_drift;
use disc_osc::verify::{
    carleson_diagnostic, coefficient_growth_margin, cross_zero_separation, default_gauge, growth_constant, growth_threshold,
    local_univalence_radius, normality_functional, normality_gauge_on_circle, quotient_growth_check, separation_pairs,
    univalence_spot_check, verify_balance, verify_separation, zero_critical_bound, PairBound, Verdict, VerificationReport,
};
use disc_osc::{DiscPoint, C64};

use crate::config::Resolved;
use crate::registry::check_info;
use crate::scenario::Prepared;

const LATTICE_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-8;
const WRONSKIAN_TOL: f64 = 1e-10;
const REMOVABILITY_TOL: f64 = 1e-6;
const INTERPOLATION_TOL: f64 = 1e-7;
const CROSS_RADIUS: f64 = 0.9;
const GAUGE_GAPS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
const GAUGE_NODES: usize = 1 << 16;

/// Everything a run produces besides the reports themselves.
#[derive(Default)]
pub struct Outcome {
    pub reports: Vec<VerificationReport>,
    pub pairs: Vec<PairBound>,
    /// Normality functional at each zero, indexed like the zero set.
    pub functional: Vec<Option<f64>>,
    /// Euclidean `(center, radius)` of the critical-point exclusion discs around zeros.
    pub exclusion: Vec<(C64, f64)>,
}

impl Outcome {
    /// Names of failed non-diagnostic checks.
    pub fn failed(&self) -> Vec<String> {
        let mut v: Vec<String> = self.reports.iter().filter(|r| !r.passed()).map(|r| r.name.clone()).collect();
        v.dedup();
        v
    }
}

fn coefficient(p: &Prepared) -> Result<&disc_osc::kernel::SharedOracle> {
    p.a.as_ref().context("scenario has no coefficient")
}

/// Gauge and growth constant used by the separation bounds.
fn gauge_and_m(p: &Prepared, cfg: &Resolved) -> Result<(GaugePsi, f64)> {
    let a = coefficient(p)?;
    let psi = match &p.gauge {
        Some(g) => g.clone(),
        None => default_gauge(weighted_sup_estimate(&**a, 2.0, &cfg.grid, SupKind::Modulus)?.estimate)?,
    };
    let m = growth_constant(&**a, &psi, &cfg.grid)?.estimate;
    Ok((psi, m))
}

pub fn run_checks(p: &Prepared, cfg: &Resolved) -> Outcome {
    let mut out = Outcome {
        functional: vec![None; p.zeros.len()],
        ..Outcome::default()
    };
    if let Ok(values) = normality_functional(&*p.f, &p.zeros) {
        for (i, v) in values {
            out.functional[i] = Some(v);
        }
    }
    // balance and log_derivative come from one pass and are always reported together
    let mut balance_done = false;
    for name in &cfg.checks {
        if (name == "balance" || name == "log_derivative") && balance_done {
            continue;
        }
        let result = run_one(name, p, cfg, &mut out);
        match result {
            Ok(reports) => out.reports.extend(reports),
            Err(e) => {
                let diagnostic = check_info(name).is_some_and(|c| c.diagnostic);
                let verdict = if diagnostic { Verdict::Diagnostic } else { Verdict::Fail };
                out.reports
                    .push(VerificationReport::new(name, verdict, f64::NEG_INFINITY).note(format!("error: {e:#}")));
            }
        }
        if name == "balance" || name == "log_derivative" {
            balance_done = true;
        }
    }
    out
}

fn run_one(name: &str, p: &Prepared, cfg: &Resolved, out: &mut Outcome) -> Result<Vec<VerificationReport>> {
    let one = |r: VerificationReport| Ok(vec![r]);
    match name {
        "zero_lattice" => one(zero_lattice(p)?),
        "separation" => {
            let (psi, m) = gauge_and_m(p, cfg)?;
            out.pairs = separation_pairs(&p.zeros, &p.critical, &psi, m);
            out.exclusion = p
                .zeros
                .points
                .iter()
                .map(|z| pseudo_disc(z, zero_critical_bound(&psi, m, z).tanh()))
                .collect();
            one(verify_separation(&p.zeros, &p.critical, &psi, m).note(format!("gauge {}", psi.label())))
        }
        "balance" | "log_derivative" => {
            let (b, l) = verify_balance(&**coefficient(p)?, &*p.f, &cfg.grid)?;
            Ok(vec![b, l])
        }
        "wronskian" => {
            let basis = p.basis.as_ref().context("scenario has no solution basis")?;
            let mut worst: f64 = 0.0;
            for k in 0..8 {
                let t = std::f64::consts::TAU * k as f64 / 8.0;
                let ray = (1..=99)
                    .map(|i| DiscPoint::new(C64::from_polar(0.01 * i as f64, t)))
                    .collect::<disc_osc::Result<Vec<_>>>()?;
                worst = worst.max(wronskian_drift(basis, &ray)?);
            }
            one(VerificationReport::judged("wronskian", WRONSKIAN_TOL - worst, 0.0)
                .param("relative_drift", worst)
                .param("tolerance", WRONSKIAN_TOL))
        }
        "residual" => {
            let bundle = p.bundle.as_ref().context("scenario has no witness bundle")?;
            let r = bundle.residual(&standard_residual_grid())?;
            one(VerificationReport::judged("residual", RESIDUAL_TOL - r, 0.0)
                .param("relative_residual", r)
                .param("tolerance", RESIDUAL_TOL))
        }
        "normality_functional" => {
            let values: Vec<f64> = out.functional.iter().flatten().copied().collect();
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(0.0, f64::max);
            one(VerificationReport::new("normality_functional", Verdict::Diagnostic, lo)
                .param("zeros", values.len() as f64)
                .param("min", lo)
                .param("max", hi)
                .note("per-zero values are in zeros.csv"))
        }
        "quotient_growth" => {
            let basis = p.basis.as_ref().context("scenario has no solution basis")?;
            let s_norm = 2.0 * weighted_sup_estimate(&**basis.a(), 2.0, &cfg.grid, SupKind::Modulus)?.estimate;
            let alpha = growth_threshold(s_norm) + 0.5;
            one(quotient_growth_check(basis, alpha, &cfg.grid)?)
        }
        "coefficient_growth" => {
            let g = coefficient_growth_margin(&**coefficient(p)?, &cfg.grid)?;
            let mut r = VerificationReport::new("coefficient_growth", Verdict::Diagnostic, -g.estimate)
                .at(vec![g.argmax])
                .param("estimate", g.estimate)
                .param("coarse", g.coarse)
                .param("settled", if g.c.is_some() { 1.0 } else { 0.0 });
            if let Some(c) = g.c {
                r = r.param("c", c);
            } else {
                r = r.note("still growing under radial extension: no finite C on this grid");
            }
            one(r)
        }
        "cross_zero_separation" => {
            let basis = p.basis.as_ref().context("scenario has no solution basis")?;
            let z1 = locate_zeros(&basis.f1, DiscPoint::origin(), CROSS_RADIUS, 1e-12)?;
            let z2 = locate_zeros(&basis.f2, DiscPoint::origin(), CROSS_RADIUS, 1e-12)?;
            one(cross_zero_separation(&z1, &z2, None, 1.0)
                .param("radius", CROSS_RADIUS)
                .note("zeros of the two basis solutions"))
        }
        "carleson" => one(carleson_diagnostic(&**coefficient(p)?, 6)?),
        "removability" => {
            let w = p.nonnormal.as_ref().context("not a non-normal witness")?;
            let n = w.coefficient.0.blaschke.zeros().len();
            let mut worst: f64 = 0.0;
            let mut at = DiscPoint::origin();
            for k in 0..n {
                let e = w.coefficient.removability_check(k)?;
                if e >= worst {
                    worst = e;
                    at = w.coefficient.0.blaschke.zeros()[k].0;
                }
            }
            one(VerificationReport::judged("removability", REMOVABILITY_TOL - worst, 0.0)
                .at(vec![at])
                .param("relative_disagreement", worst)
                .param("tolerance", REMOVABILITY_TOL))
        }
        "normality_growth" => {
            let w = p.nonnormal.as_ref().context("not a non-normal witness")?;
            let delta = w.bundle.metadata["delta"];
            let values = normality_functional(&*w.bundle.f, &p.zeros)?;
            // worst relative room on either side of δ 2^n < v ≤ 2^n
            let mut margin = f64::INFINITY;
            let mut strict = true;
            let mut at = Vec::new();
            for (pos, (i, v)) in values.iter().enumerate() {
                let scale = 2f64.powi(pos as i32 + 1);
                strict &= delta * scale < *v;
                let m = (v / (delta * scale) - 1.0).min(1.0 - v / scale);
                if m < margin {
                    margin = m;
                    at = vec![p.zeros.points[*i]];
                }
            }
            let mut r = VerificationReport::judged("normality_growth", margin, 1e-12)
                .at(at)
                .param("delta", delta)
                .param("zeros", values.len() as f64);
            if !strict {
                r.verdict = Verdict::Fail;
                r = r.note("lower bound attained: value equals delta 2^n");
            }
            one(r)
        }
        "interpolation" => {
            let pr = p.prescribed.as_ref().context("not a prescribed-values witness")?;
            let f = &pr.witness.bundle.f;
            let mut worst: f64 = 0.0;
            for (pts, target) in [(&pr.alpha, pr.a), (&pr.beta, pr.b)] {
                for z in pts {
                    worst = worst.max((f.value(*z)? - target).norm());
                }
            }
            let count = count_zeros(&**f, DiscPoint::origin(), 0.999)?;
            let mut r = VerificationReport::judged("interpolation", INTERPOLATION_TOL - worst, 0.0)
                .param("value_error", worst)
                .param("zero_count_0999", count as f64)
                .param("mu", pr.witness.mu);
            if count != 0 {
                r.verdict = Verdict::Fail;
                r = r.note("solution has zeros inside |z| = 0.999");
            }
            one(r)
        }
        "schwarzian_sup" => {
            let s = weighted_sup_estimate(&Schwarzian(lappan_function()), 2.0, &cfg.grid, SupKind::Modulus)?;
            one(VerificationReport::new("schwarzian_sup", Verdict::Diagnostic, -s.estimate)
                .at(vec![s.argmax])
                .param("estimate", s.estimate)
                .param("coarse", s.coarse)
                .param("relative_change", s.relative_change)
                .param("stable", if s.stable { 1.0 } else { 0.0 }))
        }
        "normality_gauge" => {
            let w = lappan_function();
            let mut r = VerificationReport::new("normality_gauge", Verdict::Diagnostic, 0.0).param("nodes", GAUGE_NODES as f64);
            let mut last = 0.0;
            for gap in GAUGE_GAPS {
                let (v, _) = normality_gauge_on_circle(&w, gap, GAUGE_NODES)?;
                r = r.param(&format!("sup_at_gap_{gap:e}"), v);
                last = v;
            }
            r.worst_margin = -last;
            one(r.note("sup over |z| = 1 - gap of (1-|z|^2) w^#"))
        }
        "univalence" => {
            let w = lappan_function();
            let s = weighted_sup_estimate(&Schwarzian(w.clone()), 2.0, &cfg.grid, SupKind::Modulus)?.estimate;
            let delta = local_univalence_radius(s);
            let centers = [C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(0.9, 0.0), C64::new(0.0, 0.5), C64::new(-0.7, 0.0)];
            let mut worst = 0;
            let mut at = Vec::new();
            for c in centers {
                let a = DiscPoint::new(c)?;
                let k = univalence_spot_check(&w, &a, delta)?;
                if k > worst {
                    worst = k;
                    at = vec![a];
                }
            }
            one(VerificationReport::judged("univalence", 1.0 - worst as f64, 0.0)
                .at(at)
                .param("schwarzian_norm", s)
                .param("radius", delta)
                .param("max_preimages", worst as f64))
        }
        other => bail!("check `{other}` is not implemented"),
    }
}

fn zero_lattice(p: &Prepared) -> Result<VerificationReport> {
    let expected = p.expected.as_ref().context("scenario has no closed-form zeros")?;
    let located: Vec<&DiscPoint> = p.zeros.points.iter().filter(|z| z.value().im.abs() < 1e-12).collect();
    let mut worst: f64 = 0.0;
    let mut at = Vec::new();
    for e in expected {
        let err = located.iter().map(|z| (z.value() - e.value()).norm()).fold(f64::INFINITY, f64::min);
        if err > worst {
            worst = err;
            at = vec![*e];
        }
    }
    let mut r = VerificationReport::judged("zero_lattice", LATTICE_TOL - worst, 0.0)
        .at(at)
        .param("expected", expected.len() as f64)
        .param("located", located.len() as f64)
        .param("max_error", worst)
        .param("tolerance", LATTICE_TOL);
    if located.len() != expected.len() {
        r.verdict = Verdict::Fail;
        r = r.note("located and closed-form counts differ");
    }
    Ok(r)
}
