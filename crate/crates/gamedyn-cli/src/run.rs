//! The `run` subcommand: config in, trajectory CSV + bound report JSON out.

use crate::build::{build_game, build_regs};
use crate::config::Config;
use crate::output::{f17, report_json, trajectory_csv, write_file};
use crate::Failure;
use anyhow::{anyhow, bail};
use gamedyn::analysis::{
    ac_rate_bound, default_asymptotic_onset, dmd_rate_bound, envelope_series, md_rate_bound,
    metric_value, solve_ne, solve_perturbed_ne, verify_bound, Metric, Validity,
};
use gamedyn::dynamics::{integrate, DynamicsKind, IntegratorConfig};
use gamedyn::{DynamicsSpec, Game, MirrorSpec, Profile, RegularizerKind};
use std::path::PathBuf;

/// Everything parsed out of a run config, before integration.
pub struct RunSetup {
    pub game: Game,
    pub regs: Vec<RegularizerKind>,
    pub mspec: MirrorSpec,
    pub dspec: DynamicsSpec,
    pub z0: Vec<f64>,
    pub x0: Option<Vec<f64>>,
    pub integrator: IntegratorConfig<f64>,
    pub prefix: PathBuf,
    pub bound: Option<BoundSetup>,
}

pub struct BoundSetup {
    pub metric: Metric,
    pub target: Profile,
    pub beta: f64,
    pub c0: f64,
    pub slack: f64,
    /// `None` means asymptotic with onset derived from the trajectory.
    pub validity: Option<Validity<f64>>,
}

fn resolve_metric(name: &str, kind: DynamicsKind) -> anyhow::Result<Metric> {
    Ok(match name {
        "bregman" => match kind {
            DynamicsKind::Ac => Metric::BregmanFromTarget,
            _ => Metric::BregmanToTarget,
        },
        "euclid" => Metric::EuclidSqToTarget,
        "potential-gap" => Metric::PotentialGap,
        other => bail!("key `bound.metric`: unknown metric `{other}` (use `bregman`, `euclid`, or `potential-gap`)"),
    })
}

/// Resolves the bound target: `target = known-ne | perturbed-ne |
/// <comma list>`; defaults to `perturbed-ne` for DMD and `known-ne`
/// otherwise. Solver errors count as run failures, not config errors.
fn resolve_target(
    cfg: &Config,
    game: &Game,
    mspec: &MirrorSpec,
    kind: DynamicsKind,
) -> Result<Profile, Failure> {
    let default = match kind {
        DynamicsKind::Dmd => "perturbed-ne",
        _ => "known-ne",
    };
    let spec = cfg.str_or("target", default);
    match spec {
        "known-ne" => solve_ne(game, 1e-10, 200_000).map_err(Failure::run),
        "perturbed-ne" => {
            let damping = cfg.f64_or("target.damping", 0.5).map_err(Failure::config)?;
            solve_perturbed_ne(game, mspec, 1e-10, 200_000, damping).map_err(Failure::run)
        }
        _ => {
            let values = cfg.vec_f64("target").map_err(Failure::config)?;
            game.profile(values).map_err(|e| Failure::config(anyhow!("key `target`: {e}")))
        }
    }
}

pub fn setup(cfg: &Config) -> Result<RunSetup, Failure> {
    let c = |e: anyhow::Error| Failure::config(e);
    let game = build_game(cfg).map_err(c)?;
    let regs = build_regs(cfg, "regularizer", &game).map_err(c)?;
    let epsilon = cfg.f64("epsilon").map_err(c)?;
    let mspec = MirrorSpec::new(regs.clone(), epsilon)
        .map_err(|e| Failure::config(anyhow!("key `epsilon`/`regularizer`: {e}")))?;
    let gamma = cfg.f64("gamma").map_err(c)?;
    let dspec = match cfg.str("dynamics").map_err(c)? {
        "md" => DynamicsSpec::md(gamma),
        "dmd" => DynamicsSpec::dmd(gamma),
        "ac" => {
            let r = cfg.f64("r").map_err(c)?;
            DynamicsSpec::ac(gamma, r)
        }
        other => {
            return Err(Failure::config(anyhow!(
                "key `dynamics`: unknown kind `{other}` (use `md`, `dmd`, or `ac`)"
            )))
        }
    }
    .map_err(|e| Failure::config(anyhow!("dynamics parameters: {e}")))?;

    let z0 = cfg.vec_f64("z0").map_err(c)?;
    if z0.len() != game.dim() {
        return Err(Failure::config(anyhow!(
            "key `z0`: expected {} entries, got {}",
            game.dim(),
            z0.len()
        )));
    }
    let x0 = match cfg.opt("x0") {
        Some(_) => Some(cfg.vec_f64("x0").map_err(c)?),
        None => None,
    };
    let integrator = IntegratorConfig::new(
        cfg.f64("dt").map_err(c)?,
        cfg.f64("t_end").map_err(c)?,
        cfg.usize_or("sample_every", 1).map_err(c)?,
    )
    .map_err(|e| Failure::config(anyhow!("integrator parameters: {e}")))?;
    let prefix = PathBuf::from(cfg.str("output").map_err(c)?);

    let bound = match cfg.opt("bound.metric") {
        None => None,
        Some(metric_name) => {
            let metric = resolve_metric(metric_name, dspec.kind()).map_err(c)?;
            let rho = cfg.f64_or("bound.rho", 1.0).map_err(c)?;
            let slack = cfg.f64_or("bound.slack", 1e-6).map_err(c)?;
            let target = resolve_target(cfg, &game, &mspec, dspec.kind())?;
            // Initial strategy point for the C0 terms.
            let x0_primal = match (&x0, dspec.kind()) {
                (Some(x0), DynamicsKind::Ac) => x0.clone(),
                _ => mspec.mirror_map(&z0).map_err(|e| Failure::config(anyhow!("key `z0`: {e}")))?,
            };
            let d0 = metric_value(
                Metric::BregmanToTarget,
                target.values(),
                &x0_primal,
                &regs,
                &game,
            )
            .map_err(|e| Failure::config(anyhow!("initial Bregman distance: {e}")))?;
            let validity = match cfg.str_or("validity", "all-t") {
                "all-t" => Some(Validity::AllT),
                "asymptotic" => match cfg.opt("bound.t_min") {
                    Some(_) => Some(Validity::Asymptotic {
                        t_min: cfg.f64("bound.t_min").map_err(c)?,
                    }),
                    None => None,
                },
                other => {
                    return Err(Failure::config(anyhow!(
                        "key `validity`: unknown mode `{other}` (use `all-t` or `asymptotic`)"
                    )))
                }
            };
            // Construct with a placeholder validity; beta/c0 are what we
            // need here, the final RateBound is assembled post-integration.
            let placeholder = validity.unwrap_or(Validity::AllT);
            let (beta, c0) = match dspec.kind() {
                DynamicsKind::Md => {
                    let eta = cfg.f64("bound.eta").map_err(c)?;
                    let (breg, euc) =
                        md_rate_bound(gamma, eta, epsilon, d0, rho, target.clone(), placeholder)
                            .map_err(|e| Failure::config(anyhow!("bound parameters: {e}")))?;
                    match metric {
                        Metric::EuclidSqToTarget => (euc.beta, euc.c0),
                        Metric::BregmanToTarget => (breg.beta, breg.c0),
                        _ => {
                            return Err(Failure::config(anyhow!(
                                "key `bound.metric`: `{metric_name}` is not available for md"
                            )))
                        }
                    }
                }
                DynamicsKind::Dmd => {
                    let mu = cfg.f64("bound.mu").map_err(c)?;
                    let (breg, euc) =
                        dmd_rate_bound(gamma, mu, epsilon, d0, rho, target.clone(), placeholder)
                            .map_err(|e| Failure::config(anyhow!("bound parameters: {e}")))?;
                    match metric {
                        Metric::EuclidSqToTarget => (euc.beta, euc.c0),
                        Metric::BregmanToTarget => (breg.beta, breg.c0),
                        _ => {
                            return Err(Failure::config(anyhow!(
                                "key `bound.metric`: `{metric_name}` is not available for dmd"
                            )))
                        }
                    }
                }
                DynamicsKind::Ac => {
                    let eta = cfg.f64("bound.eta").map_err(c)?;
                    let r = dspec.r().expect("ac has r");
                    let gap0 = metric_value(
                        Metric::PotentialGap,
                        target.values(),
                        &x0_primal,
                        &regs,
                        &game,
                    )
                    .map_err(|e| Failure::config(anyhow!("initial potential gap: {e}")))?;
                    let (gap, breg, euc) = ac_rate_bound(
                        gamma,
                        eta,
                        epsilon,
                        r,
                        gap0,
                        d0,
                        rho,
                        target.clone(),
                        placeholder,
                    )
                    .map_err(|e| Failure::config(anyhow!("bound parameters: {e}")))?;
                    match metric {
                        Metric::PotentialGap => (gap.beta, gap.c0),
                        Metric::BregmanFromTarget => (breg.beta, breg.c0),
                        Metric::EuclidSqToTarget => (euc.beta, euc.c0),
                        Metric::BregmanToTarget => unreachable!("bregman maps to from-target for ac"),
                    }
                }
            };
            Some(BoundSetup { metric, target, beta, c0, slack, validity })
        }
    };

    Ok(RunSetup { game, regs, mspec, dspec, z0, x0, integrator, prefix, bound })
}

/// An executed experiment: the trajectory plus, when an envelope was
/// configured, the verification results and the per-sample series.
pub struct Outcome {
    pub traj: gamedyn::Trajectory,
    pub verified: Option<Verified>,
}

pub struct Verified {
    pub report: gamedyn::analysis::BoundReport<f64>,
    pub metric_series: Vec<f64>,
    pub bound_series: Vec<f64>,
    pub beta: f64,
    pub c0: f64,
    pub metric: Metric,
    pub slack: f64,
}

pub fn execute(s: &RunSetup) -> Result<Outcome, Failure> {
    let traj = integrate(
        &s.dspec,
        &s.game,
        &s.mspec,
        &s.z0,
        s.x0.as_deref(),
        &s.integrator,
    )
    .map_err(Failure::run)?;

    let verified = match &s.bound {
        None => None,
        Some(b) => {
            let validity = match b.validity {
                Some(v) => v,
                None => Validity::Asymptotic {
                    t_min: default_asymptotic_onset(&traj, &s.game).map_err(Failure::run)?,
                },
            };
            let bound = gamedyn::RateBound::new(b.beta, b.c0, b.metric, b.target.clone(), validity)
                .map_err(Failure::run)?;
            let report =
                verify_bound(&traj, &bound, &s.game, &s.regs, b.slack).map_err(Failure::run)?;
            let metric_series: Vec<f64> = traj
                .strategy_samples()
                .iter()
                .map(|x| metric_value(b.metric, b.target.values(), x, &s.regs, &s.game))
                .collect::<gamedyn::Result<_>>()
                .map_err(Failure::run)?;
            let bound_series =
                envelope_series(&traj, &bound, &s.game, &s.regs).map_err(Failure::run)?;
            Some(Verified {
                report,
                metric_series,
                bound_series,
                beta: b.beta,
                c0: b.c0,
                metric: b.metric,
                slack: b.slack,
            })
        }
    };
    Ok(Outcome { traj, verified })
}

/// Writes `<prefix>_trajectory.csv` and `<prefix>_report.json`; returns the
/// exit code (0 pass, 2 bound violation).
pub fn write_artifacts(s: &RunSetup, outcome: &Outcome) -> Result<i32, Failure> {
    let csv_path = s.prefix.with_file_name(artifact(&s.prefix, "trajectory.csv"));
    let report_path = s.prefix.with_file_name(artifact(&s.prefix, "report.json"));
    match &outcome.verified {
        None => {
            write_file(&csv_path, &trajectory_csv(&outcome.traj, None)).map_err(Failure::run_any)?;
            write_file(&report_path, "{\n  \"bound\": null,\n  \"pass\": true\n}\n")
                .map_err(Failure::run_any)?;
            Ok(0)
        }
        Some(v) => {
            let csv = trajectory_csv(&outcome.traj, Some((&v.metric_series, &v.bound_series)));
            write_file(&csv_path, &csv).map_err(Failure::run_any)?;
            let json = report_json(&v.report, v.beta, v.c0, v.metric.name(), v.slack);
            write_file(&report_path, &json).map_err(Failure::run_any)?;
            if v.report.pass() {
                println!(
                    "pass: {} samples within envelope (max ratio {})",
                    v.report.checked_times,
                    f17(v.report.max_ratio)
                );
                Ok(0)
            } else {
                println!(
                    "FAIL: {} of {} samples exceed the envelope (max ratio {})",
                    v.report.violations.len(),
                    v.report.checked_times,
                    f17(v.report.max_ratio)
                );
                Ok(2)
            }
        }
    }
}

/// Runs one experiment. Returns the process exit code (0 pass, 2 bound
/// violation); infrastructure failures come back as `Failure`.
pub fn run(cfg: &Config) -> Result<i32, Failure> {
    let s = setup(cfg)?;
    let outcome = execute(&s)?;
    write_artifacts(&s, &outcome)
}

/// `<prefix>_trajectory.csv` style naming that tolerates prefixes with
/// directories.
fn artifact(prefix: &std::path::Path, suffix: &str) -> String {
    let stem = prefix
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    format!("{stem}_{suffix}")
}
