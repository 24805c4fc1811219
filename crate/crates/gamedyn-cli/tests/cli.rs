//! End-to-end tests of the `gamedyn` binary: exit-code contract, artifact
//! schema, and byte-identical reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn gamedyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gamedyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn rps_config(out_prefix: &Path) -> String {
    format!(
        "game = rps\n\
         game.w = 1\n\
         game.l = 5\n\
         dynamics = dmd\n\
         regularizer = entropy\n\
         epsilon = 2.1\n\
         gamma = 1\n\
         z0 = 1,2,3,1,2,3\n\
         dt = 0.01\n\
         t_end = 20\n\
         sample_every = 10\n\
         bound.metric = bregman\n\
         bound.mu = 2\n\
         validity = all-t\n\
         target = perturbed-ne\n\
         output = {}\n",
        out_prefix.display()
    )
}

#[test]
fn run_passing_bound_exits_zero_with_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "rps.conf", &rps_config(&dir.path().join("rps")));
    let out = gamedyn(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(dir.path().join("rps_trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,x_0,x_1,x_2,x_3,x_4,x_5,metric,bound");
    let first = lines.next().unwrap();
    let fields: Vec<&str> = first.split(',').collect();
    assert_eq!(fields.len(), 9);
    // 17 significant digits everywhere.
    for f in &fields {
        let mantissa = f.split('e').next().unwrap();
        assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 17, "field {f}");
        f.parse::<f64>().unwrap();
    }
    // Every strategy sample lies on the two simplices.
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        for b in 0..2 {
            let s: f64 = v[1 + 3 * b..4 + 3 * b].iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    let report = std::fs::read_to_string(dir.path().join("rps_report.json")).unwrap();
    assert!(report.contains("\"metric\": \"bregman_to_target\""));
    assert!(report.contains("\"mode\": \"all_t\""));
    assert!(report.contains("\"pass\": true"));
}

#[test]
fn run_is_byte_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let mut artifacts = Vec::new();
    for name in ["a", "b"] {
        let prefix = dir.path().join(name).join("rps");
        std::fs::create_dir_all(prefix.parent().unwrap()).unwrap();
        let cfg = write_config(dir.path(), &format!("{name}.conf"), &rps_config(&prefix));
        assert_eq!(gamedyn(&["run", &cfg]).status.code(), Some(0));
        artifacts.push((
            std::fs::read(prefix.with_file_name("rps_trajectory.csv")).unwrap(),
            std::fs::read(prefix.with_file_name("rps_report.json")).unwrap(),
        ));
    }
    assert_eq!(artifacts[0].0, artifacts[1].0);
    assert_eq!(artifacts[0].1, artifacts[1].1);
}

#[test]
fn violated_bound_exits_two() {
    // Euclidean projection on RPS pins the trajectory to the boundary early
    // on, so the all-t envelope is violated (asymptotically it holds).
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "viol.conf",
        &rps_config(&dir.path().join("viol")).replace("regularizer = entropy", "regularizer = euclidean"),
    );
    let out = gamedyn(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2), "stdout: {}", String::from_utf8_lossy(&out.stdout));
    let report = std::fs::read_to_string(dir.path().join("viol_report.json")).unwrap();
    assert!(report.contains("\"pass\": false"));
}

#[test]
fn bad_config_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // ε ≤ μ: the DMD envelope precondition fails before any integration.
    let cfg = write_config(
        dir.path(),
        "bad.conf",
        &rps_config(&dir.path().join("bad")).replace("epsilon = 2.1", "epsilon = 1.5"),
    );
    let out = gamedyn(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("epsilon > mu"), "stderr: {stderr}");

    // Unknown game name.
    let cfg = write_config(dir.path(), "bad2.conf", "game = nonesuch\ndynamics = md\n");
    assert_eq!(gamedyn(&["run", &cfg]).status.code(), Some(3));

    // Entropy regularizer on a box domain.
    let cfg = write_config(
        dir.path(),
        "bad3.conf",
        "game = quadratic\ngame.q = 1,2\ngame.b = 0,0\ngame.lo = -1,-1\ngame.hi = 1,1\n\
         dynamics = md\nregularizer = entropy\nepsilon = 0.5\ngamma = 1\nz0 = 0,0\n\
         dt = 0.01\nt_end = 1\n",
    );
    assert_eq!(gamedyn(&["run", &cfg]).status.code(), Some(3));
}

#[test]
fn failed_solve_exits_four() {
    // A starved iteration budget makes the equilibrium solver report
    // non-convergence, which is a run failure rather than a config error.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "ne.conf",
        "game = quadratic\ngame.q = 1,2\ngame.b = 0.3,0.3\ngame.lo = -1,-1\ngame.hi = 1,1\n\
         mode = ne\ntol = 1e-12\nmax_iter = 2\n",
    );
    let out = gamedyn(&["solve-ne", &cfg]);
    assert_eq!(out.status.code(), Some(4), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
}

#[test]
fn analyze_reports_sampled_moduli() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "an.conf",
        &format!(
            "game = rps\ngame.w = 1\ngame.l = 5\nh = entropy\nsamples = 20000\nseed = 1\n\
             output = {}\n",
            dir.path().join("analysis.json").display()
        ),
    );
    let out = gamedyn(&["analyze", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let json = std::fs::read_to_string(dir.path().join("analysis.json")).unwrap();
    for key in ["eta_est", "mu_est", "relative_eta_est", "relative_mu_est", "samples_used"] {
        assert!(json.contains(key), "missing {key} in {json}");
    }
    // RPS is hypo- but not strictly monotone: η = 0 exactly, μ near 2.
    assert!(json.contains("\"eta_est\": 0.0000000000000000e0"));
    let mu: f64 = json
        .lines()
        .find(|l| l.contains("\"mu_est\""))
        .and_then(|l| l.split(':').nth(1))
        .map(|v| v.trim().trim_end_matches(',').parse().unwrap())
        .unwrap();
    assert!(mu > 1.9 && mu <= 2.0 + 1e-9, "mu_est = {mu}");
}

#[test]
fn solve_ne_prints_uniform_profile() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ne.conf", "game = network-mp\nmode = ne\ntol = 1e-10\n");
    let out = gamedyn(&["solve-ne", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let start = stdout.find('[').unwrap();
    let end = stdout.find(']').unwrap();
    let xs: Vec<f64> = stdout[start + 1..end]
        .split(',')
        .map(|s| s.trim().parse().unwrap())
        .collect();
    assert_eq!(xs.len(), 6);
    for v in xs {
        assert!((v - 0.5).abs() < 1e-8);
    }
}

#[test]
fn reproduce_cases_pass() {
    for case in ["rps", "network-mp", "adversarial"] {
        let dir = tempfile::tempdir().unwrap();
        let out = gamedyn(&["reproduce", case, "--out", &dir.path().display().to_string()]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "case {case}: stderr {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let summary = dir.path().join(format!("{}_summary.json", case.replace('-', "_")));
        let json = std::fs::read_to_string(&summary).unwrap();
        assert!(json.contains("\"pass\": true"), "case {case}: {json}");
    }
}
