//! `disc-osc`: run, list and verify oscillation experiments in the unit disc.
//!
//! Exit status: 0 when every non-diagnostic check passes, 1 when one fails
//! (or a computation breaks down), 2 for configuration and usage errors.

mod checks;
mod config;
mod output;
mod registry;
mod scenario;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{config_error, ConfigError, Scenario, ScenarioConfig};
use registry::{scenario_info, CHECKS};

/// Thread count for the parallel sweeps; unset means one per core.
const THREADS_ENV: &str = "DISC_OSC_THREADS";

#[derive(Parser)]
#[command(name = "disc-osc", version, about = "Zeros, critical points and growth of solutions of f'' + A f = 0 in the unit disc")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config and write its reports.
    Run { config: PathBuf },
    /// List scenarios, their parameters and what each reproduces.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Run one scenario with its default checks and print the verdicts.
    Verify {
        scenario: String,
        /// Parameter override, repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Check to run instead of the defaults, repeatable.
        #[arg(long = "check", value_name = "NAME")]
        checks: Vec<String>,
        /// Also write report files here.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| config_error(format!("{THREADS_ENV}={v} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| anyhow::anyhow!("thread pool: {e}"))
}

fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::List { json } => {
            list(json)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { config } => {
            configure_threads()?;
            let cfg = config::resolve(config::load(&config)?)?;
            execute(&cfg, true)
        }
        Command::Verify {
            scenario,
            params,
            checks,
            output_dir,
        } => {
            configure_threads()?;
            let scenario = Scenario::parse(&scenario)?;
            let mut parameters = BTreeMap::new();
            for p in &params {
                let (k, v) = config::parse_param(p)?;
                parameters.insert(k, v);
            }
            let raw = ScenarioConfig {
                scenario,
                parameters,
                grid: config::default_grid(),
                output_dir: output_dir.clone().unwrap_or_default(),
                checks,
                plot: false,
            };
            let cfg = config::resolve(raw)?;
            execute(&cfg, output_dir.is_some())
        }
    }
}

fn execute(cfg: &config::Resolved, write: bool) -> Result<ExitCode> {
    let prepared = scenario::prepare(cfg)?;
    let outcome = checks::run_checks(&prepared, cfg);
    println!("{}: {} zeros, {} critical points", prepared.label, prepared.zeros.len(), prepared.critical.len());
    for r in &outcome.reports {
        let verdict = serde_json::to_value(r.verdict)?;
        println!("  {:<24} {:<10} worst margin {}", r.name, verdict.as_str().unwrap_or("?"), output::num(r.worst_margin));
        for n in &r.notes {
            println!("  {:<24} {n}", "");
        }
    }
    if write {
        output::write_all(&cfg.output_dir, cfg, &prepared, &outcome)?;
        println!("reports written to {}", cfg.output_dir.display());
    }
    let failed = outcome.failed();
    if failed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("failed checks: {}", failed.join(", "));
        Ok(ExitCode::from(1))
    }
}

fn list(json: bool) -> Result<()> {
    let infos: Vec<_> = Scenario::ALL.iter().map(|s| scenario_info(*s)).collect();
    if json {
        println!("{}", serde_json::to_string_pretty(&infos)?);
        return Ok(());
    }
    println!("{:<20} {:<58} REPRODUCES", "SCENARIO", "PARAMETERS (default)");
    for i in &infos {
        let mut params: Vec<String> = i.params.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
        for x in i.indexed {
            params.push(format!("{}<k>_re/_im, k from {} ({} given)", x.prefix, x.first, x.defaults.len()));
        }
        println!("{:<20} {:<58} {}", i.name, params.join(" "), i.reproduces);
    }
    println!();
    println!("checks (diagnostic checks never fail a run):");
    for c in &CHECKS {
        let tag = if c.diagnostic { " [diagnostic]" } else { "" };
        println!("  {:<22} {}{tag}", c.name, c.meaning);
    }
    Ok(())
}
