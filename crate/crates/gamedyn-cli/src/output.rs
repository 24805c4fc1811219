//! CSV/JSON artifact writers. All floating-point output uses 17 significant
//! digits so artifacts round-trip bit-exactly.

use anyhow::{Context, Result};
use gamedyn::analysis::{BoundReport, Validity};
use gamedyn::Trajectory;
use std::fmt::Write as _;
use std::path::Path;

/// 17 significant digits, scientific.
pub fn f17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// Renders the trajectory CSV: `t,x_0..x_{n-1}` plus `metric,bound` columns
/// when an envelope is configured.
pub fn trajectory_csv(traj: &Trajectory, metric_bound: Option<(&[f64], &[f64])>) -> String {
    let xs = traj.strategy_samples();
    let n = xs[0].len();
    let mut out = String::new();
    out.push('t');
    for i in 0..n {
        let _ = write!(out, ",x_{i}");
    }
    if metric_bound.is_some() {
        out.push_str(",metric,bound");
    }
    out.push('\n');
    for (k, &t) in traj.times.iter().enumerate() {
        out.push_str(&f17(t));
        for &v in &xs[k] {
            out.push(',');
            out.push_str(&f17(v));
        }
        if let Some((metric, bound)) = metric_bound {
            let _ = write!(out, ",{},{}", f17(metric[k]), f17(bound[k]));
        }
        out.push('\n');
    }
    out
}

pub fn json_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn validity_name(v: &Validity<f64>) -> &'static str {
    match v {
        Validity::AllT => "all_t",
        Validity::Asymptotic { .. } => "asymptotic",
    }
}

/// Renders a bound-verification report as JSON.
pub fn report_json(
    report: &BoundReport<f64>,
    beta: f64,
    c0: f64,
    metric_name: &str,
    slack: f64,
) -> String {
    let mut out = String::from("{\n");
    let _ = write!(out, "  \"metric\": \"{}\",\n", json_escape(metric_name));
    let _ = write!(out, "  \"beta\": {},\n", f17(beta));
    let _ = write!(out, "  \"c0\": {},\n", f17(c0));
    let _ = write!(out, "  \"slack\": {},\n", f17(slack));
    let _ = write!(out, "  \"mode\": \"{}\",\n", validity_name(&report.mode));
    if let Validity::Asymptotic { t_min } = report.mode {
        let _ = write!(out, "  \"t_min\": {},\n", f17(t_min));
    }
    let _ = write!(out, "  \"checked_times\": {},\n", report.checked_times);
    let _ = write!(out, "  \"max_ratio\": {},\n", f17(report.max_ratio));
    out.push_str("  \"violations\": [");
    for (i, v) in report.violations.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "\n    {{\"t\": {}, \"measured\": {}, \"bound\": {}}}",
            f17(v.t),
            f17(v.measured),
            f17(v.bound)
        );
    }
    if !report.violations.is_empty() {
        out.push_str("\n  ");
    }
    out.push_str("],\n");
    let _ = write!(out, "  \"pass\": {}\n", report.pass());
    out.push_str("}\n");
    out
}

/// Least-squares decay exponent of `metric` over the final half of the time
/// window: fit `log m(t) ≈ a − βt` on samples with `t ≥ (t_first+t_last)/2`
/// and `m` above underflow noise, return `β`.
pub fn fitted_exponent(times: &[f64], metric: &[f64]) -> f64 {
    let t_mid = (times[0] + times[times.len() - 1]) / 2.0;
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(metric)
        .filter(|&(&t, &m)| t >= t_mid && m > 1e-290)
        .map(|(&t, &m)| (t, m.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let st: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let stt: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sty: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sty - st * sy) / (n * stt - st * st);
    -slope
}
