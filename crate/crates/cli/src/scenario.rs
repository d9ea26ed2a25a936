//! Builds a scenario: coefficient, solution, located zeros and critical points.

use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{Context, Result};
use disc_osc::constructions::{
    build_nonnormal_witness, build_prescribed_values_witness, corona_grid, dyadic_zeros, example_blaschke_quotient, example_gamma, example_q,
    lappan_function, NonnormalWitness, PrescribedValuesWitness, WitnessBundle,
};
use disc_osc::hyperbolic::pseudo_distance;
use disc_osc::kernel::{BlaschkeProduct, Closed, GaugePsi, Polynomial, SharedOracle};
use disc_osc::locator::{locate_critical_points, locate_zeros, real_axis_scan, ZeroSet};
use disc_osc::ode::{share, solution_basis, OdeSettings, SolutionBasis, SolutionOracle};
use disc_osc::{DiscPoint, C64};

use crate::config::{config_error, Resolved, Scenario};

const LOCATE_TOL: f64 = 1e-12;

pub struct Prepared {
    pub label: String,
    /// `None` only for the Lappan function, which solves no fixed equation here.
    pub a: Option<SharedOracle>,
    /// The function whose zeros and critical points are reported.
    pub f: SharedOracle,
    pub zeros: ZeroSet,
    pub critical: ZeroSet,
    /// Closed-form zeros inside the scanned region, when known.
    pub expected: Option<Vec<DiscPoint>>,
    pub gauge: Option<GaugePsi>,
    pub bundle: Option<WitnessBundle>,
    pub basis: Option<SolutionBasis>,
    pub nonnormal: Option<NonnormalWitness>,
    pub prescribed: Option<Prescribed>,
    pub metadata: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

pub struct Prescribed {
    pub witness: PrescribedValuesWitness,
    pub alpha: Vec<DiscPoint>,
    pub beta: Vec<DiscPoint>,
    pub a: C64,
    pub b: C64,
}

fn unit_set(points: Vec<DiscPoint>, radius: f64) -> ZeroSet {
    let n = points.len();
    ZeroSet {
        points,
        multiplicities: vec![1; n],
        center: DiscPoint::origin(),
        radius,
        certified_count: n as u32,
    }
}

fn merge(mut into: Vec<DiscPoint>, extra: &[DiscPoint]) -> Vec<DiscPoint> {
    for p in extra {
        if into.iter().all(|q| pseudo_distance(p, q) > 1e-8) {
            into.push(*p);
        }
    }
    into
}

/// Real zeros and critical points of a real solution on `(-r, r)`, in increasing order.
fn real_scan(a: &SharedOracle, initial: Option<(C64, C64)>, r: f64) -> Result<(Vec<DiscPoint>, Vec<DiscPoint>)> {
    let (f0, f0p) = initial.context("solution is not finite at the origin")?;
    let st = OdeSettings::default();
    let fwd = real_axis_scan(&**a, f0.re, f0p.re, DiscPoint::real(r)?, &st)?;
    let back = real_axis_scan(&**a, f0.re, f0p.re, DiscPoint::real(-r)?, &st)?;
    let sorted = |mut v: Vec<DiscPoint>| {
        v.sort_by(|x, y| x.value().re.total_cmp(&y.value().re));
        v
    };
    Ok((
        sorted(merge(fwd.zeros.points, &back.zeros.points)),
        sorted(merge(fwd.critical.points, &back.critical.points)),
    ))
}

fn empty(radius: f64) -> ZeroSet {
    ZeroSet::empty(DiscPoint::origin(), radius)
}

fn from_bundle(label: String, bundle: WitnessBundle, zeros: ZeroSet, critical: ZeroSet) -> Prepared {
    Prepared {
        label,
        a: Some(bundle.a.clone()),
        f: bundle.f.clone(),
        zeros,
        critical,
        expected: None,
        gauge: bundle.gauge.clone(),
        metadata: bundle.metadata.clone(),
        bundle: Some(bundle),
        basis: None,
        nonnormal: None,
        prescribed: None,
        notes: Vec::new(),
    }
}

pub fn prepare(cfg: &Resolved) -> Result<Prepared> {
    match cfg.scenario {
        Scenario::GammaExample => {
            let gamma = cfg.get("gamma");
            let r = cfg.get("scan_radius");
            let ex = example_gamma(gamma)?;
            let (zeros, crit) = real_scan(&ex.bundle.a, ex.bundle.initial, r)?;
            // f = sin(γ log((1+z)/(1-z))) vanishes, and has critical points, only on the real axis
            let mut expected = Vec::new();
            for n in 0i64.. {
                let z = ex.zero(n);
                if z.norm() >= r {
                    break;
                }
                if n > 0 {
                    expected.insert(0, ex.zero(-n));
                }
                expected.push(z);
            }
            let basis = solution_basis(ex.bundle.a.clone(), DiscPoint::origin())?;
            let mut p = from_bundle(format!("gamma_example(gamma={gamma})"), ex.bundle, unit_set(zeros, r), unit_set(crit, r));
            p.expected = Some(expected);
            p.basis = Some(basis);
            p.notes.push("zeros and critical points of this solution are real; the real axis is scanned".into());
            Ok(p)
        }
        Scenario::QExample => {
            let q = cfg.get("q");
            let r = cfg.get("scan_radius");
            let radius = cfg.get("radius");
            let ex = example_q(q)?;
            let (zeros, crit) = real_scan(&ex.bundle.a, ex.bundle.initial, r)?;
            let off_zeros = locate_zeros(&*ex.bundle.f, DiscPoint::origin(), radius, LOCATE_TOL)?;
            let off_crit = locate_critical_points(ex.bundle.f.clone(), DiscPoint::origin(), radius, LOCATE_TOL)?;
            let mut expected = Vec::new();
            for n in 1u32.. {
                let z = ex.zero(n)?;
                if z.norm() >= r {
                    break;
                }
                expected.push(z);
            }
            let basis = solution_basis(ex.bundle.a.clone(), DiscPoint::origin())?;
            let gauge = ex.gauge()?;
            let mut p = from_bundle(
                format!("q_example(q={q})"),
                ex.bundle,
                unit_set(merge(zeros, &off_zeros.points), r),
                unit_set(merge(crit, &off_crit.points), r),
            );
            p.expected = Some(expected);
            p.basis = Some(basis);
            p.gauge = Some(gauge);
            Ok(p)
        }
        Scenario::BlaschkeQuotient => {
            let zs = cfg
                .indexed("z")
                .into_iter()
                .map(|(x, y)| DiscPoint::new(C64::new(x, y)))
                .collect::<disc_osc::Result<Vec<_>>>()
                .map_err(|e| config_error(format!("Blaschke zeros: {e}")))?;
            let radius = cfg.get("radius");
            let which = cfg.get("solution").round() as u32;
            let bundle = example_blaschke_quotient(BlaschkeProduct::new(zs)?)?;
            let basis = solution_basis(bundle.a.clone(), DiscPoint::origin())?;
            let f: SharedOracle = match which {
                0 => bundle.f.clone(),
                1 => share(basis.f1.clone()),
                _ => share(basis.f2.clone()),
            };
            let zeros = locate_zeros(&*f, DiscPoint::origin(), radius, LOCATE_TOL)?;
            let critical = locate_critical_points(f.clone(), DiscPoint::origin(), radius, LOCATE_TOL)?;
            let label = format!("{} solution {which}", bundle.name);
            let mut p = from_bundle(label, bundle, zeros, critical);
            p.f = f;
            p.basis = Some(basis);
            if which == 0 {
                p.notes.push("2/(B+2) has no zeros: separation holds vacuously".into());
            }
            Ok(p)
        }
        Scenario::NonnormalWitness => {
            let n = cfg.get("n").round() as u32;
            let zs = dyadic_zeros(n)?;
            let w = build_nonnormal_witness(&zs, None)?;
            let mut p = from_bundle(w.bundle.name.clone(), w.bundle.clone(), unit_set(zs, 1.0), empty(1.0));
            p.nonnormal = Some(w);
            p.notes
                .push(format!("finite truncation with {n} zeros: growth of the normality functional is observed only up to n = {n}"));
            Ok(p)
        }
        Scenario::PrescribedValues => {
            let n = cfg.get("n").round() as i32;
            let alpha: Vec<DiscPoint> = (1..=n).map(|k| DiscPoint::from_one_minus(C64::new(3f64.powi(-k), 0.0))).collect::<disc_osc::Result<_>>()?;
            let beta: Vec<DiscPoint> = alpha.iter().map(|p| p.reflected()).collect();
            let (a, b) = (C64::new(cfg.get("a_re"), cfg.get("a_im")), C64::new(cfg.get("b_re"), cfg.get("b_im")));
            let witness = build_prescribed_values_witness(&alpha, &beta, a, b, &corona_grid())?;
            let zeros = locate_zeros(&*witness.bundle.f, DiscPoint::origin(), 0.999, LOCATE_TOL)?;
            let mut p = from_bundle(witness.bundle.name.clone(), witness.bundle.clone(), zeros, empty(0.999));
            p.prescribed = Some(Prescribed { witness, alpha, beta, a, b });
            Ok(p)
        }
        Scenario::Lappan => {
            let radius = cfg.get("radius");
            let w: SharedOracle = Arc::new(lappan_function());
            let zeros = locate_zeros(&*w, DiscPoint::origin(), radius, LOCATE_TOL)?;
            let critical = locate_critical_points(w.clone(), DiscPoint::origin(), radius, LOCATE_TOL)?;
            Ok(Prepared {
                label: "lappan".into(),
                a: None,
                f: w,
                zeros,
                critical,
                expected: None,
                gauge: None,
                bundle: None,
                basis: None,
                nonnormal: None,
                prescribed: None,
                metadata: BTreeMap::new(),
                notes: vec!["non-normality is a boundary limit; the gauge table shows finite radii only".into()],
            })
        }
        Scenario::CustomCoefficient => {
            let coeffs: Vec<C64> = cfg.dense("c").into_iter().map(|(x, y)| C64::new(x, y)).collect();
            let radius = cfg.get("radius");
            let a: SharedOracle = Arc::new(Closed(Polynomial(coeffs.clone())));
            let f0 = C64::new(cfg.get("f0_re"), cfg.get("f0_im"));
            let f0p = C64::new(cfg.get("f1_re"), cfg.get("f1_im"));
            if f0 == C64::new(0.0, 0.0) && f0p == C64::new(0.0, 0.0) {
                return Err(config_error("f(0) and f'(0) are both zero: the solution vanishes identically"));
            }
            let f = share(SolutionOracle::new(a.clone(), DiscPoint::origin(), f0, f0p));
            let zeros = locate_zeros(&*f, DiscPoint::origin(), radius, LOCATE_TOL)?;
            let critical = locate_critical_points(f.clone(), DiscPoint::origin(), radius, LOCATE_TOL)?;
            let bundle = WitnessBundle::new(format!("custom(degree={})", coeffs.len().saturating_sub(1)), a.clone(), f)?;
            let basis = solution_basis(a, DiscPoint::origin())?;
            let mut p = from_bundle(bundle.name.clone(), bundle, zeros, critical);
            p.basis = Some(basis);
            Ok(p)
        }
    }
}
