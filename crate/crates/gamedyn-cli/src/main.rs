//! `gamedyn` — configuration-driven experiments for continuous-time game
//! dynamics: run an experiment config, reproduce a pinned case study,
//! estimate monotonicity moduli, or solve for equilibria.
//!
//! Exit codes: 0 = pass, 2 = bound violation, 3 = config error,
//! 4 = solver/integrator failure.

mod build;
mod config;
mod output;
mod reproduce;
mod run;

use anyhow::anyhow;
use clap::{Parser, Subcommand};
use config::Config;
use gamedyn::analysis::{solve_ne, solve_perturbed_ne};
use gamedyn::MirrorSpec;
use output::{f17, write_file};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

/// A failed invocation, split by whose fault it is for the exit code.
pub enum Failure {
    /// Bad config: exit 3.
    Config(anyhow::Error),
    /// Solver or integrator failure: exit 4.
    Run(anyhow::Error),
}

impl Failure {
    pub fn config(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }

    pub fn run(e: gamedyn::Error) -> Self {
        Failure::Run(anyhow!(e))
    }

    pub fn run_any(e: anyhow::Error) -> Self {
        Failure::Run(e)
    }
}

#[derive(Parser)]
#[command(name = "gamedyn", about = "Continuous-time game dynamics experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment config: integrate, verify the configured rate
    /// bound, write `<output>_trajectory.csv` and `<output>_report.json`.
    Run { config: PathBuf },
    /// Reproduce a pinned case study: `rps`, `network-mp`, or `adversarial`.
    Reproduce {
        case: String,
        /// Output directory for artifacts.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Estimate (relative) monotonicity moduli of a game by pair sampling.
    Analyze { config: PathBuf },
    /// Solve for a Nash equilibrium (or a perturbed one).
    SolveNe { config: PathBuf },
}

fn analyze(cfg: &Config) -> Result<i32, Failure> {
    let c = Failure::config;
    let game = build::build_game(cfg).map_err(c)?;
    let regs = build::build_regs(cfg, "h", &game).map_err(c)?;
    let samples = cfg.usize_or("samples", 100_000).map_err(c)?;
    let seed = cfg.u64_or("seed", 0).map_err(c)?;
    let report =
        gamedyn::games::estimate_monotonicity(&game, &regs, samples, seed).map_err(Failure::run)?;
    let mut json = String::from("{\n");
    let _ = write!(json, "  \"eta_est\": {},\n", f17(report.eta_est));
    let _ = write!(json, "  \"mu_est\": {},\n", f17(report.mu_est));
    let _ = write!(json, "  \"relative_eta_est\": {},\n", f17(report.relative_eta_est));
    let _ = write!(json, "  \"relative_mu_est\": {},\n", f17(report.relative_mu_est));
    let _ = write!(json, "  \"samples_used\": {}\n}}\n", report.samples_used);
    print!("{json}");
    if let Some(path) = cfg.opt("output") {
        write_file(&PathBuf::from(path), &json).map_err(Failure::run_any)?;
    }
    Ok(0)
}

fn solve(cfg: &Config) -> Result<i32, Failure> {
    let c = Failure::config;
    let game = build::build_game(cfg).map_err(c)?;
    let tol = cfg.f64_or("tol", 1e-10).map_err(c)?;
    let max_iter = cfg.usize_or("max_iter", 200_000).map_err(c)?;
    let profile = match cfg.str_or("mode", "ne") {
        "ne" => solve_ne(&game, tol, max_iter).map_err(Failure::run)?,
        "perturbed" => {
            let regs = build::build_regs(cfg, "regularizer", &game).map_err(c)?;
            let epsilon = cfg.f64("epsilon").map_err(c)?;
            let damping = cfg.f64_or("damping", 0.5).map_err(c)?;
            let mspec = MirrorSpec::new(regs, epsilon)
                .map_err(|e| Failure::config(anyhow!("key `epsilon`/`regularizer`: {e}")))?;
            solve_perturbed_ne(&game, &mspec, tol, max_iter, damping).map_err(Failure::run)?
        }
        other => {
            return Err(Failure::config(anyhow!(
                "key `mode`: unknown mode `{other}` (use `ne` or `perturbed`)"
            )))
        }
    };
    let mut json = String::from("{\n  \"x\": [");
    for (i, &v) in profile.values().iter().enumerate() {
        if i > 0 {
            json.push_str(", ");
        }
        json.push_str(&f17(v));
    }
    json.push_str("]\n}\n");
    print!("{json}");
    if let Some(path) = cfg.opt("output") {
        write_file(&PathBuf::from(path), &json).map_err(Failure::run_any)?;
    }
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<i32, Failure> {
    match cli.cmd {
        Cmd::Run { config } => run::run(&Config::load(&config).map_err(Failure::config)?),
        Cmd::Reproduce { case, out } => reproduce::reproduce(&case, &out),
        Cmd::Analyze { config } => analyze(&Config::load(&config).map_err(Failure::config)?),
        Cmd::SolveNe { config } => solve(&Config::load(&config).map_err(Failure::config)?),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Run(e)) => {
            eprintln!("run error: {e:#}");
            ExitCode::from(4)
        }
    }
}
