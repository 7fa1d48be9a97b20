use std::path::{Path, PathBuf};
use std::process::Command;

use quarter_green::output::csv_section;
use serde_json::Value;

const SU3: &str = r#"{"kernel": {"p_1_0": 0.3333333333333333, "p_-1_1": 0.3333333333333333, "p_0_-1": 0.3333333333333334}}"#;

fn spec_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], envs: &[(&str, &Path)]) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_quarter-green"));
    cmd.args(args).env_remove("QUARTER_GREEN_CACHE");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn uniformize_reports_k() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(dir.path(), "su3.json", SU3);
    let (code, out) = run(&["--spec", spec.to_str().unwrap(), "--format", "json", "uniformize"], &[]);
    assert_eq!(code, 0, "{out}");
    let v: Value = serde_json::from_str(&out).unwrap();
    let k = v["constants"].as_array().unwrap().iter().find(|r| r["name"] == "K").unwrap();
    let arg = k["arg"].as_f64().unwrap();
    assert!((arg + std::f64::consts::PI / 3.0).abs() < 1e-10);
    assert_eq!(v["format"], "quarter-green v1");
    assert_eq!(v["config"]["command"]["name"], "uniformize");
    let x4 = v["branch_points"].as_array().unwrap().iter().find(|r| r["name"] == "x4").unwrap();
    assert!((x4["value"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    let y4 = v["branch_points"].as_array().unwrap().iter().find(|r| r["name"] == "y4").unwrap();
    assert_eq!(y4["value"], "inf");
}

#[test]
fn validate_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let bad = spec_file(
        dir.path(),
        "drift.json",
        r#"{"kernel": {"p_1_0": 0.5, "p_-1_0": 0.25, "p_1_1": 0.03571428571428571, "p_1_-1": 0.03571428571428571,
            "p_0_1": 0.03571428571428571, "p_0_-1": 0.03571428571428571, "p_-1_1": 0.03571428571428571, "p_-1_-1": 0.03571428571428571}}"#,
    );
    let (code, out) = run(&["--spec", bad.to_str().unwrap(), "validate"], &[]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["kind"], "validation");
    assert!(v["error"]["message"].as_str().unwrap().contains("horizontal drift"));

    let good = spec_file(dir.path(), "su3.json", SU3);
    let (code, out) = run(&["--spec", good.to_str().unwrap(), "validate"], &[]);
    assert_eq!(code, 0);
    let (_, rows) = csv_section(&out, "warnings").unwrap();
    assert_eq!(rows.len(), 5);
    let (_, rows) = csv_section(&out, "summary").unwrap();
    let res = rows.iter().find(|r| r[0] == "harmonicity_residual").unwrap();
    assert!(f(res[1]) <= 1e-12);
}

#[test]
fn green_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(dir.path(), "su3.json", SU3);
    let (code, out) = run(
        &["--spec", spec.to_str().unwrap(), "green", "--start", "2,3", "--max-sum", "15", "--compare-oracle", "600"],
        &[],
    );
    assert_eq!(code, 0, "{out}");
    let (head, rows) = csv_section(&out, "green").unwrap();
    let ratio = head.iter().position(|c| *c == "ratio").unwrap();
    assert_eq!(rows.len(), 105);
    for r in &rows {
        assert!((f(r[ratio]) - 1.0).abs() < 0.005, "{r:?}");
    }
}

#[test]
fn output_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(dir.path(), "su3.json", SU3);
    let s = spec.to_str().unwrap();
    let args = |t: &'static str| -> Vec<String> {
        ["--spec", s, "--threads", t, "martin", "--radius", "10", "--radius", "20"]
            .iter()
            .map(|a| a.to_string())
            .collect()
    };
    let a1: Vec<String> = args("1");
    let a4: Vec<String> = args("4");
    let (c1, o1) = run(&a1.iter().map(String::as_str).collect::<Vec<_>>(), &[]);
    let (_, o1b) = run(&a1.iter().map(String::as_str).collect::<Vec<_>>(), &[]);
    let (c4, o4) = run(&a4.iter().map(String::as_str).collect::<Vec<_>>(), &[]);
    assert_eq!((c1, c4), (0, 0), "{o1}");
    assert_eq!(o1, o1b);
    let body = |o: &str| o.lines().filter(|l| !l.starts_with("# config")).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&o1), body(&o4));
    assert!(o1.contains("\"threads\":1"));
}

#[test]
fn oracle_command_uses_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let spec = spec_file(dir.path(), "su3.json", SU3);
    let args = ["--spec", spec.to_str().unwrap(), "oracle", "--n", "64", "--window", "4", "--mc-paths", "2000"];
    let (code, first) = run(&args, &[("QUARTER_GREEN_CACHE", &cache)]);
    assert_eq!(code, 0, "{first}");
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let (_, second) = run(&args, &[("QUARTER_GREEN_CACHE", &cache)]);
    assert_eq!(first, second);
    let (_, grid) = csv_section(&first, "grid").unwrap();
    assert_eq!(grid.len(), 16);
    assert!(csv_section(&first, "monte_carlo").is_some());
    let (_, abs) = csv_section(&first, "absorption").unwrap();
    assert_eq!(abs.len(), 11);
}

#[test]
fn asymptotic_and_sweep_commands() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_file(dir.path(), "family.json", r#"{"family": {"alpha": 1, "beta": 0, "p11": 0, "p10": 0.2}}"#);
    let out_path = dir.path().join("asym.json");
    let (code, out) = run(
        &["--spec", spec.to_str().unwrap(), "--out", out_path.to_str().unwrap(), "--format", "json", "asymptotic", "--radius", "50"],
        &[],
    );
    assert_eq!((code, out.as_str()), (0, ""));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let rows = v["asymptotic"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert!((r["ratio"].as_f64().unwrap() - 1.0).abs() < 0.12);
    }

    let (code, out) = run(&["sweep", "--alpha", "1:1:1", "--beta", "0:0:1", "--grid", "4"], &[]);
    assert_eq!(code, 0, "{out}");
    let (head, rows) = csv_section(&out, "sweep").unwrap();
    let feas = head.iter().position(|c| *c == "feasible").unwrap();
    let c = head.iter().position(|c| *c == "C").unwrap();
    let ok: Vec<_> = rows.iter().filter(|r| r[feas] == "true").collect();
    assert!(!ok.is_empty());
    assert!(ok.iter().all(|r| f(r[c]) > 0.0));
    assert_eq!(rows.len(), 16);
}

#[test]
fn errors_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = spec_file(dir.path(), "u.json", r#"{"kernel": {"p_1_0": 1}, "colour": "red"}"#);
    let (code, out) = run(&["--spec", unknown.to_str().unwrap(), "validate"], &[]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["kind"], "spec");

    let (code, out) = run(&["green", "--start", "nonsense"], &[]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["kind"], "usage");

    let (code, out) = run(&["uniformize"], &[]);
    assert_eq!(code, 1);
    assert!(out.contains("--spec"));

    let infeasible = spec_file(dir.path(), "i.json", r#"{"family": {"alpha": 3, "beta": 0, "p11": 0.1, "p10": 0.1}}"#);
    let (code, out) = run(&["--spec", infeasible.to_str().unwrap(), "uniformize"], &[]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["kind"], "infeasible_parameters");

    let uniform = spec_file(dir.path(), "uni.json", r#"{"kernel": {"p_1_1": 0.125, "p_1_0": 0.125, "p_1_-1": 0.125, "p_0_1": 0.125, "p_0_-1": 0.125, "p_-1_1": 0.125, "p_-1_0": 0.125, "p_-1_-1": 0.125}}"#);
    let (code, out) = run(&["--spec", uniform.to_str().unwrap(), "green", "--target", "2,2"], &[]);
    assert_eq!(code, 1);
    assert!(out.contains("\"spec\""));
}
