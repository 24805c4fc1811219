//! Constructing games and geometries from config keys.

use crate::config::Config;
use anyhow::{anyhow, bail, Context, Result};
use gamedyn::games::{
    build_adversarial_attack, build_quadratic_diag, build_rps_with_coupling, network_mp_instance,
    RpsCoupling,
};
use gamedyn::geometry::{Domain, RegularizerKind};
use gamedyn::Game;
use std::path::Path;

/// Parses the adversarial dataset CSV (`a,b` header, one `a,b` row per
/// example).
pub fn parse_dataset(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| anyhow!("empty dataset"))?;
    if header.trim() != "a,b" {
        bail!("dataset header must be `a,b`, got `{}`", header.trim());
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| anyhow!("dataset row {}: expected `a,b`", i + 2))?;
        rows.push((
            a.trim().parse().map_err(|e| anyhow!("dataset row {}: bad a ({e})", i + 2))?,
            b.trim().parse().map_err(|e| anyhow!("dataset row {}: bad b ({e})", i + 2))?,
        ));
    }
    Ok(rows)
}

/// Builds the game named by `game` (`rps`, `network-mp`, `adversarial`,
/// `quadratic`) from its `game.*` parameters.
pub fn build_game(cfg: &Config) -> Result<Game> {
    match cfg.str("game")? {
        "rps" => {
            let w = cfg.f64("game.w")?;
            let l = cfg.f64("game.l")?;
            let coupling = match cfg.str_or("game.coupling", "cross") {
                "cross" => RpsCoupling::Cross,
                "self" => RpsCoupling::SelfCoupled,
                other => bail!("key `game.coupling`: unknown coupling `{other}`"),
            };
            build_rps_with_coupling(w, l, coupling).context("key `game`: rps")
        }
        "network-mp" => Ok(network_mp_instance()),
        "adversarial" => {
            let path = cfg.str("game.dataset")?;
            let text = std::fs::read_to_string(Path::new(path))
                .with_context(|| format!("key `game.dataset`: cannot read {path}"))?;
            let data = parse_dataset(&text)?;
            build_adversarial_attack(
                &data,
                (cfg.f64("game.w0")?, cfg.f64("game.w1")?),
                cfg.f64("game.r_reg")?,
                (cfg.f64_or("game.iota_min", -1.0)?, cfg.f64_or("game.iota_max", 1.0)?),
            )
            .context("key `game`: adversarial")
        }
        "quadratic" => {
            let q = cfg.vec_f64("game.q")?;
            let b = cfg.vec_f64("game.b")?;
            let lo = cfg.vec_f64("game.lo")?;
            let hi = cfg.vec_f64("game.hi")?;
            if lo.len() != q.len() || hi.len() != q.len() || b.len() != q.len() {
                bail!("keys `game.q`, `game.b`, `game.lo`, `game.hi` must have equal length");
            }
            build_quadratic_diag(&q, &b, vec![Domain::Box { lo, hi }])
                .context("key `game`: quadratic")
        }
        other => bail!("key `game`: unknown builtin `{other}`"),
    }
}

/// Resolves per-player regularizers from `key` (`entropy` or `euclidean`;
/// a single name applies to every player, or a comma list gives one per
/// player).
pub fn build_regs(cfg: &Config, key: &str, game: &Game) -> Result<Vec<RegularizerKind<f64>>> {
    let raw = cfg.str(key)?;
    let names: Vec<&str> = raw.split(',').map(str::trim).collect();
    let domains = game.domains();
    let names: Vec<&str> = if names.len() == 1 {
        vec![names[0]; domains.len()]
    } else if names.len() == domains.len() {
        names
    } else {
        bail!("key `{key}`: expected 1 or {} names, got {}", domains.len(), names.len());
    };
    names
        .iter()
        .zip(domains)
        .enumerate()
        .map(|(p, (&name, domain))| match name {
            "euclidean" => Ok(RegularizerKind::SquaredEuclidean(domain.clone())),
            "entropy" => match domain {
                Domain::Simplex { dim } => Ok(RegularizerKind::NegativeEntropy { dim: *dim }),
                Domain::Box { .. } => {
                    bail!("key `{key}`: entropy regularizer for player {p} requires a simplex domain")
                }
            },
            other => bail!("key `{key}`: unknown regularizer `{other}` (use `euclidean` or `entropy`)"),
        })
        .collect()
}
