//! End-to-end runs of the scenario runner, driven in-process.

use ricci_af::cli::{run, ScenarioConfig};
use std::path::{Path, PathBuf};

fn scenario(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("scenario.toml");
    std::fs::write(&path, body).unwrap();
    path
}

fn go(args: &[&str]) -> i32 {
    let mut v = vec!["ricci-af"];
    v.extend_from_slice(args);
    run(v)
}

fn cmd(sub: &str, cfg: &Path, out: &Path, extra: &[&str]) -> i32 {
    let mut v = vec![sub, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    v.extend_from_slice(extra);
    go(&v)
}

const FLAT: &str = r#"
[profile]
n = 3
family = { family = "flat" }
grid = { kind = "uniform", s_max = 10.0, m = 100 }
[flow]
t_end = 0.05
"#;

const BUMP: &str = r#"
[profile]
n = 3
family = { family = "gaussian_bump", a = 0.05, r0 = 2.0, w = 0.5 }
grid = { kind = "uniform", s_max = 10.0, m = 200 }
"#;

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn flat_simulate_succeeds_and_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenario(tmp.path(), FLAT);
    let out = tmp.path().join("out");
    assert_eq!(cmd("simulate", &cfg, &out, &[]), 0);
    for f in ["diagnostics.csv", "manifest.json", "summary.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "completed");
}

#[test]
fn families_lists_every_family() {
    assert_eq!(go(&["families"]), 0);
    let text = ricci_af::cli::families_text();
    for name in ["flat", "gaussian_bump", "schwarzschild_slice", "conformal_bump", "neck"] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn usage_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    assert_eq!(go(&["no-such-command"]), 1);
    let bad = scenario(tmp.path(), "[flow]\ncfl = 0.1\nbogus = 1\n");
    assert_eq!(cmd("simulate", &bad, &out, &[]), 1);
    let missing = scenario(tmp.path(), "[profile]\nfile = \"nowhere.json\"\n");
    assert_eq!(cmd("simulate", &missing, &out, &[]), 1);
    let n1 = scenario(tmp.path(), "[c1_search]\nn = 1\n");
    assert_eq!(cmd("c1-search", &n1, &out, &[]), 1);
    // simulate without a scenario
    assert_eq!(go(&["simulate", "--out", out.to_str().unwrap()]), 1);
}

#[test]
fn blowup_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenario(tmp.path(), &format!("{BUMP}[flow]\nt_end = 0.1\nblowup_threshold = 1e-9\n"));
    assert_eq!(cmd("simulate", &cfg, &tmp.path().join("out"), &[]), 2);
}

#[test]
fn step_limit_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenario(tmp.path(), &format!("{BUMP}[flow]\nt_end = 1.0\nmax_steps = 5\n"));
    let out = tmp.path().join("out");
    assert_eq!(cmd("simulate", &cfg, &out, &[]), 3);
    let summary = std::fs::read_to_string(out.join("summary.json")).unwrap();
    assert!(summary.contains("step limit"), "{summary}");
}

#[test]
fn certify_passes_flat_and_small_bumps_and_fails_schwarzschild() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let flat = scenario(tmp.path(), FLAT);
    assert_eq!(cmd("certify", &flat, &out, &["--threshold", "0.1"]), 0);
    let cert: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["pass"], true);
    assert_eq!(cert["verdict"], "pass");
    assert!(cert["one_sidedness_note"].is_string());
    assert_eq!(cert["chi"], 0.0);

    let small = scenario(
        tmp.path(),
        r#"
[profile]
n = 3
family = { family = "gaussian_bump", a = 0.001, r0 = 2.0, w = 0.5 }
grid = { kind = "uniform", s_max = 20.0, m = 400 }
"#,
    );
    assert_eq!(cmd("certify", &small, &out, &["--threshold", "0.1"]), 0);

    let schw = scenario(
        tmp.path(),
        r#"
[profile]
n = 3
family = { family = "schwarzschild_slice", m = 1.0 }
grid = { kind = "uniform", s_max = 20.0, m = 400 }
"#,
    );
    assert_eq!(cmd("certify", &schw, &out, &["--threshold", "0.1"]), 4);
    let cert: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["pass"], false);
    assert_eq!(cert["verdict"], "fail");
    assert!(cert["chi"].as_f64().unwrap() > 0.1);
}

#[test]
fn simulate_output_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenario(
        tmp.path(),
        &format!(
            "{BUMP}[flow]\nt_end = 0.05\nmonitor_every = 20\nsnapshot_every = 50\n[monitors]\nweighted_sobolev = true\nbudget_alpha = 1.0\n"
        ),
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(cmd("simulate", &cfg, &a, &[]), 0);
    assert_eq!(cmd("simulate", &cfg, &b, &["--threads", "1"]), 0);
    let (fa, fb) = (files(&a), files(&b));
    assert!(fa.len() >= 4);
    assert_eq!(fa, fb);
}

#[test]
fn c1_search_is_deterministic_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenario(
        tmp.path(),
        r#"
[c1_search]
n = 3
config = { basis_dim = 2, sweep_points = 6, starts = 2, budget = 60 }
export = { s_max = 6.0, m = 300 }
"#,
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(cmd("c1-search", &cfg, &a, &["--seed", "11"]), 0);
    assert_eq!(cmd("c1-search", &cfg, &b, &["--seed", "11"]), 0);
    assert_eq!(files(&a), files(&b));
    for f in ["sweep.csv", "witness_profile.json", "summary.json"] {
        assert!(a.join(f).is_file(), "{f}");
    }
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 11);
    assert!(summary["estimate"].as_f64().unwrap() > 0.0);
    // the exported profile is a readable neck
    let p = ricci_af::geometry::read_profile(&a.join("witness_profile.json")).unwrap();
    assert_eq!(p.n(), 3);
}

#[test]
fn zero_budget_runs_the_sweep_only() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenario(
        tmp.path(),
        "[c1_search]\nn = 4\nconfig = { basis_dim = 2, sweep_points = 5, budget = 0 }\n",
    );
    let out = tmp.path().join("out");
    assert_eq!(cmd("c1-search", &cfg, &out, &[]), 0);
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary["descent_min"].is_null());
    assert_eq!(summary["estimate"], summary["sweep_min"]);
}

#[test]
fn output_dir_resolves_against_the_scenario() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenario(tmp.path(), &format!("{FLAT}[output]\ndir = \"from_config\"\n"));
    assert_eq!(go(&["simulate", "--config", cfg.to_str().unwrap()]), 0);
    assert!(tmp.path().join("from_config/summary.json").is_file());
}

#[test]
fn zero_threads_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenario(tmp.path(), FLAT);
    assert_eq!(cmd("simulate", &cfg, &tmp.path().join("out"), &["--threads", "0"]), 1);
}

#[test]
fn seed_flag_reaches_every_seeded_component() {
    let mut cfg = ScenarioConfig::from_toml(
        "[flow.diagnostics.entropy]\nhorizon = 1.0\n[c1_search]\nn = 3\n",
    )
    .unwrap();
    cfg.apply_seed(99);
    assert_eq!(cfg.c1_search.config.seed, 99);
    assert_eq!(cfg.flow.diagnostics.entropy.unwrap().optimizer.seed, 99);
}

#[test]
fn heat_excess_calibrates_the_companion() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenario(
        tmp.path(),
        &format!("{BUMP}[flow]\nt_end = 0.01\nmonitor_every = 10\n[monitors]\nheat_excess = 0.04\n"),
    );
    let out = tmp.path().join("out");
    assert_eq!(cmd("simulate", &cfg, &out, &[]), 0);
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary["eps"].as_f64().unwrap() > 0.0);
    assert!(summary["final"]["keps_n2"].as_f64().is_some());
    assert_eq!(summary["monotone"]["keps_n2"]["violations"].as_array().map(|v| v.len()), Some(0));
}
