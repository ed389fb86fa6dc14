use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_radialmp");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

/// ex2 on a coarse grid, with `edit` applied to the parsed config.
fn small_ex2(dir: &Path, name: &str, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut cfg: Value = serde_json::from_str(&std::fs::read_to_string(fixture("ex2")).unwrap()).unwrap();
    cfg["grid"]["nodes"] = 400.into();
    edit(&mut cfg);
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

#[test]
fn solve_artifacts_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_ex2(dir.path(), "cfg.json", |_| {});
    let mut outputs = Vec::new();
    for tag in ["a", "b"] {
        let out = dir.path().join(tag);
        let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--quiet"]);
        assert_eq!(code(&o), 0, "{}", text(&o.stderr));
        let csv = std::fs::read(out.join("solution.csv")).unwrap();
        let json = std::fs::read(out.join("solution.json")).unwrap();
        outputs.push((csv, json));
    }
    assert_eq!(outputs[0], outputs[1]);
    let csv = text(&outputs[0].0);
    assert!(csv.starts_with("# config_sha256="));
    let row = csv.lines().nth(3).unwrap();
    let r = row.split(',').next().unwrap();
    assert_eq!(r.split('e').next().unwrap().replace(['-', '.'], "").len(), 17);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_ex2(dir.path(), "cfg.json", |_| {});
    let mut reports = Vec::new();
    for threads in ["1", "4"] {
        let report = dir.path().join(format!("r{threads}.json"));
        let o = Command::new(BIN)
            .env("RADIALMP_THREADS", threads)
            .args(["solve", "--config", cfg.to_str().unwrap(), "--report", report.to_str().unwrap(), "--quiet"])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", text(&o.stderr));
        reports.push(std::fs::read(report).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn partial_solver_block_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_ex2(dir.path(), "cfg.json", |c| {
        c["solver"] = serde_json::json!({ "restarts": 2 });
    });
    let report = dir.path().join("exp.json");
    let o = run(&["exponents", "--config", cfg.to_str().unwrap(), "--report", report.to_str().unwrap(), "--quiet"]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
}

#[test]
fn seed_changes_the_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let mut hashes = Vec::new();
    for seed in ["1", "2"] {
        let report = dir.path().join(format!("{seed}.json"));
        let o = run(&[
            "exponents",
            "--config",
            fixture("ex2").to_str().unwrap(),
            "--seed",
            seed,
            "--report",
            report.to_str().unwrap(),
            "--quiet",
        ]);
        assert_eq!(code(&o), 0);
        let v: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
        assert_eq!(v["seed"].as_u64().unwrap().to_string(), seed);
        hashes.push(v["config_sha256"].as_str().unwrap().to_string());
    }
    assert_ne!(hashes[0], hashes[1]);
}

#[test]
fn check_names_the_failing_limit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_ex2(dir.path(), "bad.json", |c| {
        c["potentials"]["A"] = serde_json::json!({ "form": "pure_power", "c": 1.0, "e": 5.0 });
        c.as_object_mut().unwrap().remove("exponents");
    });
    let o = run(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = text(&o.stderr);
    assert!(err.contains("r->"), "{err}");
}

#[test]
fn check_accepts_the_examples() {
    for name in ["ex1", "ex2", "ex3"] {
        let o = run(&["check", "--config", fixture(name).to_str().unwrap(), "--quiet"]);
        assert_eq!(code(&o), 0, "{name}: {}", text(&o.stderr));
    }
}

#[test]
fn empty_overlap_is_reported() {
    let o = run(&["exponents", "--config", fixture("ex1").to_str().unwrap(), "--N", "3"]);
    assert_eq!(code(&o), 0);
    assert!(text(&o.stdout).contains("I1 ∩ I2 empty"));
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"N\": 6,\n  \"potentials\": \n}").unwrap();
    let o = run(&["check", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(text(&o.stderr).contains("line"));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["probe", "--end", "middle"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn reproduce_examples_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["reproduce-examples", "--N", "6", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let table = text(&o.stdout);
    let ex2 = table.lines().find(|l| l.starts_with("ex2")).unwrap();
    assert!(ex2.contains("(4, 12)") && ex2.contains("PASS"), "{table}");
    assert!(dir.path().join("examples.json").exists());
}

#[test]
fn non_convergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_ex2(dir.path(), "cfg.json", |c| {
        c["solver"] = serde_json::json!({ "max_iter": 1, "restarts": 1 });
    });
    let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--quiet"]);
    assert_eq!(code(&o), 3, "{}", text(&o.stderr));
}

#[test]
fn probe_writes_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_ex2(dir.path(), "cfg.json", |_| {});
    let csv = dir.path().join("probe.csv");
    let o = run(&[
        "probe",
        "--config",
        cfg.to_str().unwrap(),
        "--radii",
        "1e-3:1e-2:3",
        "--out",
        csv.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let body = std::fs::read_to_string(csv).unwrap();
    assert_eq!(body.lines().filter(|l| !l.starts_with('#')).count(), 4);
}
