//! Experiment configuration: a TOML file with a few top-level keys plus
//! `[parameters]` and `[grid]` tables.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use disc_osc::kernel::GridSpec;
use serde::{Deserialize, Serialize};

use crate::registry::{check_info, scenario_info, ScenarioInfo};

/// Anything wrong with the configuration itself (exit status 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    GammaExample,
    QExample,
    BlaschkeQuotient,
    NonnormalWitness,
    PrescribedValues,
    Lappan,
    CustomCoefficient,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::GammaExample,
        Scenario::QExample,
        Scenario::BlaschkeQuotient,
        Scenario::NonnormalWitness,
        Scenario::PrescribedValues,
        Scenario::Lappan,
        Scenario::CustomCoefficient,
    ];

    pub fn name(self) -> &'static str {
        scenario_info(self).name
    }

    pub fn parse(s: &str) -> anyhow::Result<Self> {
        Self::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| config_error(format!("unknown scenario `{s}` (see `disc-osc list`)")))
    }
}

pub fn default_grid() -> GridSpec {
    GridSpec::Dyadic {
        k_max: 12,
        base_angles: 16,
        angle_cap: 1024,
    }
}

fn default_output() -> PathBuf {
    PathBuf::from("disc-osc-out")
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default = "default_grid")]
    pub grid: GridSpec,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Empty means the scenario's default checks.
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub plot: bool,
}

/// A validated configuration with every parameter filled in.
#[derive(Clone, Debug, Serialize)]
pub struct Resolved {
    pub scenario: Scenario,
    pub parameters: BTreeMap<String, f64>,
    pub grid: GridSpec,
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub checks: Vec<String>,
    #[serde(skip)]
    pub plot: bool,
}

impl Resolved {
    pub fn get(&self, key: &str) -> f64 {
        self.parameters[key]
    }

    /// `(re, im)` pairs of an indexed complex list such as `z1_re, z1_im, z2_re, ...`.
    pub fn indexed(&self, prefix: &str) -> Vec<(f64, f64)> {
        let mut by_index: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
        for (k, v) in &self.parameters {
            if let Some((i, part)) = split_indexed(k, prefix) {
                let e = by_index.entry(i).or_insert((0.0, 0.0));
                if part == "re" {
                    e.0 = *v;
                } else {
                    e.1 = *v;
                }
            }
        }
        by_index.into_values().collect()
    }

    /// Like [`indexed`](Self::indexed) but positional: entry `k` is `<prefix>k`, missing ones are zero.
    pub fn dense(&self, prefix: &str) -> Vec<(f64, f64)> {
        let keys: Vec<u32> = self.parameters.keys().filter_map(|k| split_indexed(k, prefix)).map(|(i, _)| i).collect();
        let mut out = vec![(0.0, 0.0); keys.iter().max().map_or(0, |m| *m as usize + 1)];
        for (k, v) in &self.parameters {
            if let Some((i, part)) = split_indexed(k, prefix) {
                let e = &mut out[i as usize];
                if part == "re" {
                    e.0 = *v;
                } else {
                    e.1 = *v;
                }
            }
        }
        out
    }
}

fn split_indexed<'a>(key: &'a str, prefix: &str) -> Option<(u32, &'a str)> {
    let rest = key.strip_prefix(prefix)?;
    let (num, part) = rest.split_once('_')?;
    let i = num.parse().ok()?;
    matches!(part, "re" | "im").then_some((i, part))
}

pub fn load(path: &Path) -> anyhow::Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg: ScenarioConfig = toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    if cfg.output_dir.is_relative() {
        // relative output paths are taken from the config file's directory
        if let Some(dir) = path.parent() {
            cfg.output_dir = dir.join(&cfg.output_dir);
        }
    }
    Ok(cfg)
}

pub fn resolve(cfg: ScenarioConfig) -> anyhow::Result<Resolved> {
    let info = scenario_info(cfg.scenario);
    let parameters = resolve_parameters(info, &cfg.parameters)?;
    cfg.grid.validate().map_err(|e| config_error(format!("grid: {e}")))?;
    let checks = if cfg.checks.is_empty() {
        info.default_checks.iter().map(|s| s.to_string()).collect()
    } else {
        cfg.checks
    };
    for c in &checks {
        if check_info(c).is_none() {
            return Err(config_error(format!("unknown check `{c}`")));
        }
        if !info.checks.contains(&c.as_str()) {
            return Err(config_error(format!("check `{c}` does not apply to scenario {}", info.name)));
        }
    }
    Ok(Resolved {
        scenario: cfg.scenario,
        parameters,
        grid: cfg.grid,
        output_dir: cfg.output_dir,
        checks,
        plot: cfg.plot,
    })
}

fn resolve_parameters(info: &ScenarioInfo, given: &BTreeMap<String, f64>) -> anyhow::Result<BTreeMap<String, f64>> {
    let mut out: BTreeMap<String, f64> = info.params.iter().map(|p| (p.name.to_string(), p.default)).collect();
    let has_indexed = given.keys().any(|k| info.indexed.iter().any(|x| split_indexed(k, x.prefix).is_some()));
    if !has_indexed {
        for x in info.indexed {
            for (i, (re, im)) in (x.first..).zip(x.defaults) {
                out.insert(format!("{}{i}_re", x.prefix), *re);
                out.insert(format!("{}{i}_im", x.prefix), *im);
            }
        }
    }
    for (k, v) in given {
        let known = info.params.iter().any(|p| p.name == k) || info.indexed.iter().any(|x| split_indexed(k, x.prefix).is_some());
        if !known {
            return Err(config_error(format!("unknown parameter `{k}` for scenario {}", info.name)));
        }
        if !v.is_finite() {
            return Err(config_error(format!("parameter `{k}` must be finite")));
        }
        out.insert(k.clone(), *v);
    }
    for p in info.params {
        let v = out[p.name];
        if let Some((lo, hi)) = p.range {
            if !(v > lo && v < hi) {
                return Err(config_error(format!("parameter `{}` = {v} outside ({lo}, {hi})", p.name)));
            }
        }
    }
    Ok(out)
}

/// `k=v` pairs from the command line.
pub fn parse_param(s: &str) -> anyhow::Result<(String, f64)> {
    let (k, v) = s.split_once('=').ok_or_else(|| config_error(format!("expected key=value, got `{s}`")))?;
    let v: f64 = v.trim().parse().map_err(|_| config_error(format!("parameter `{k}`: `{v}` is not a number")))?;
    Ok((k.trim().to_string(), v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> anyhow::Result<Resolved> {
        resolve(toml::from_str(text).map_err(|e| config_error(e.to_string()))?)
    }

    #[test]
    fn defaults_fill_in() {
        let r = parse("scenario = \"gamma_example\"").unwrap();
        assert_eq!(r.get("gamma"), 1.0);
        assert_eq!(r.grid, default_grid());
        assert!(!r.checks.is_empty());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse("scenario = \"gamma_example\"\nbogus = 1").is_err());
        assert!(parse("scenario = \"gamma_example\"\n[parameters]\ndelta = 1.0").is_err());
        assert!(parse("scenario = \"gamma_example\"\n[grid]\nkind = \"dyadic\"\nk_max = 3\nbase_angles = 4\nangle_cap = 8\nextra = 1").is_err());
        assert!(parse("scenario = \"gamma_example\"\nchecks = [\"nonsense\"]").is_err());
        assert!(parse("scenario = \"lappan\"\nchecks = [\"separation\"]").is_err());
        assert!(parse("scenario = \"no_such\"").is_err());
    }

    #[test]
    fn indexed_parameters() {
        let r = parse("scenario = \"blaschke_quotient\"\n[parameters]\nz2_re = 0.5\nz1_im = -0.25").unwrap();
        assert_eq!(r.indexed("z"), vec![(0.0, -0.25), (0.5, 0.0)]);
        let d = parse("scenario = \"blaschke_quotient\"").unwrap();
        assert_eq!(d.indexed("z").len(), 8);
        let c = parse("scenario = \"custom_coefficient\"\n[parameters]\nc2_re = 3.0").unwrap();
        assert_eq!(c.dense("c"), vec![(0.0, 0.0), (0.0, 0.0), (3.0, 0.0)]);
    }

    #[test]
    fn range_checked() {
        assert!(parse("scenario = \"gamma_example\"\n[parameters]\ngamma = -1.0").is_err());
        assert!(parse("scenario = \"q_example\"\n[parameters]\nq = 1.0").is_err());
    }

    #[test]
    fn command_line_params() {
        assert_eq!(parse_param("gamma=2").unwrap(), ("gamma".into(), 2.0));
        assert!(parse_param("gamma").is_err());
        assert!(parse_param("gamma=two").is_err());
    }
}
