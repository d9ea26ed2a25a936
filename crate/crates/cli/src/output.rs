//! Report files: `report.json`, `zeros.csv`, `bounds.csv` and `plot.svg`.
//!
//! CSV files are RFC 4180 with a header row; every real number is written
//! with 17 significant digits so it round-trips exactly.
//!
//! `zeros.csv`: `index, re, im, multiplicity, functional` where `functional`
//! is `(1 - |z|^2) |f'(z)|` (empty when not computed).
//!
//! `bounds.csv`: `kind, i, j, first_re, first_im, second_re, second_im,
//! distance, bound, margin` for every pair checked by `separation`; `i` and
//! `j` index the zero (or critical-point) lists in `report.json`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use disc_osc::kernel::GridSpec;
use disc_osc::locator::ZeroSet;
use disc_osc::verify::{PairKind, VerificationReport};
use disc_osc::C64;
use serde::Serialize;

use crate::checks::Outcome;
use crate::config::Resolved;
use crate::scenario::Prepared;

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[derive(Serialize)]
struct Point {
    re: f64,
    im: f64,
}

fn points(z: &ZeroSet) -> Vec<Point> {
    z.points.iter().map(|p| Point { re: p.value().re, im: p.value().im }).collect()
}

#[derive(Serialize)]
pub struct Report<'a> {
    schema_version: u32,
    scenario: &'static str,
    label: &'a str,
    parameters: &'a BTreeMap<String, f64>,
    grid: &'a GridSpec,
    checks: &'a [String],
    passed: bool,
    failed_checks: Vec<String>,
    zeros: Vec<Point>,
    critical_points: Vec<Point>,
    metadata: &'a BTreeMap<String, f64>,
    notes: &'a [String],
    reports: &'a [VerificationReport],
}

pub fn report<'a>(cfg: &'a Resolved, p: &'a Prepared, out: &'a Outcome) -> Report<'a> {
    let failed = out.failed();
    Report {
        schema_version: SCHEMA_VERSION,
        scenario: cfg.scenario.name(),
        label: &p.label,
        parameters: &cfg.parameters,
        grid: &cfg.grid,
        checks: &cfg.checks,
        passed: failed.is_empty(),
        failed_checks: failed,
        zeros: points(&p.zeros),
        critical_points: points(&p.critical),
        metadata: &p.metadata,
        notes: &p.notes,
        reports: &out.reports,
    }
}

pub fn zeros_csv(p: &Prepared, out: &Outcome) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "re", "im", "multiplicity", "functional"])?;
    for (i, z) in p.zeros.points.iter().enumerate() {
        let functional = out.functional.get(i).copied().flatten().map(num).unwrap_or_default();
        w.write_record([
            i.to_string(),
            num(z.value().re),
            num(z.value().im),
            p.zeros.multiplicities.get(i).copied().unwrap_or(1).to_string(),
            functional,
        ])?;
    }
    Ok(w.into_inner().context("flushing zeros.csv")?)
}

pub fn bounds_csv(out: &Outcome) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "i", "j", "first_re", "first_im", "second_re", "second_im", "distance", "bound", "margin"])?;
    for b in &out.pairs {
        let kind = match b.kind {
            PairKind::ZeroCritical => "zero_critical",
            PairKind::ZeroZero => "zero_zero",
        };
        w.write_record([
            kind.to_string(),
            b.i.to_string(),
            b.j.to_string(),
            num(b.first.value().re),
            num(b.first.value().im),
            num(b.second.value().re),
            num(b.second.value().im),
            num(b.distance),
            num(b.bound),
            num(b.margin()),
        ])?;
    }
    Ok(w.into_inner().context("flushing bounds.csv")?)
}

const SIZE: f64 = 600.0;
const PAD: f64 = 20.0;

fn to_svg(z: C64) -> (f64, f64) {
    let r = SIZE / 2.0 - PAD;
    (SIZE / 2.0 + r * z.re, SIZE / 2.0 - r * z.im)
}

/// Unit circle, zeros as dots, critical points as crosses, exclusion discs dashed.
pub fn plot_svg(p: &Prepared, out: &Outcome) -> String {
    let r = SIZE / 2.0 - PAD;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(s, r#"<circle cx="{c}" cy="{c}" r="{r}" fill="none" stroke="black"/>"#, c = SIZE / 2.0);
    for (c, rad) in &out.exclusion {
        let (x, y) = to_svg(*c);
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="none" stroke="gray" stroke-dasharray="4 3"/>"#, rad * r);
    }
    for z in &p.zeros.points {
        let (x, y) = to_svg(z.value());
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="blue"/>"#);
    }
    for z in &p.critical.points {
        let (x, y) = to_svg(z.value());
        let _ = writeln!(
            s,
            r#"<path d="M{:.3} {:.3} L{:.3} {:.3} M{:.3} {:.3} L{:.3} {:.3}" stroke="red"/>"#,
            x - 3.0,
            y - 3.0,
            x + 3.0,
            y + 3.0,
            x - 3.0,
            y + 3.0,
            x + 3.0,
            y - 3.0
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_all(dir: &Path, cfg: &Resolved, p: &Prepared, out: &Outcome) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut json = serde_json::to_string_pretty(&report(cfg, p, out))?;
    json.push('\n');
    std::fs::write(dir.join("report.json"), json)?;
    std::fs::write(dir.join("zeros.csv"), zeros_csv(p, out)?)?;
    std::fs::write(dir.join("bounds.csv"), bounds_csv(out)?)?;
    if cfg.plot {
        std::fs::write(dir.join("plot.svg"), plot_svg(p, out))?;
    }
    Ok(())
}
