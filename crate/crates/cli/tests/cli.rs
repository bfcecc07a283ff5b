use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn matchkit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matchkit")).args(args).current_dir(dir).output().expect("spawn matchkit")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const P3: &str = "p match mcm 4 3 tree\ne a b\ne c d\ne b c\n";

#[test]
fn run_alg1_on_p3() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "p3.inst", P3);
    let out = matchkit(&["run", "--alg", "alg1", "p3.inst"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["expectation"], "3/2");
    assert_eq!(r["opt"], 2.0);
    assert_eq!(r["ratio"], "4/3");
    assert_eq!(r["schema_version"], 1);
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let gen = matchkit(&["gen", "--kind", "tree-any-order", "--n", "60", "--seed", "9", "--out", "t.inst"], dir.path());
    assert_eq!(gen.status.code(), Some(0));
    let a = matchkit(&["run", "--alg", "alg2", "--lemmas", "t.inst"], dir.path());
    let b = matchkit(&["run", "--alg", "alg2", "--lemmas", "t.inst"], dir.path());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn alg3_per_step_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    matchkit(&["gen", "--kind", "growing-tree", "--n", "150", "--seed", "4", "--out", "tree.inst"], dir.path());
    let out = matchkit(&["run", "--alg", "alg3", "--epsilon", "0.25", "--per-step", "tree.inst"], dir.path());
    let r = json(&out);
    assert_eq!(r["per_step"]["failures"], 0);
    assert!(r["per_step"]["worst_ratio"].as_f64().unwrap() <= 1.75);
    assert_eq!(r["params"]["epsilon"], "1/4");
}

#[test]
fn mcgregor_adversary_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let g = matchkit(
        &["gen", "--kind", "mcgregor-adversary", "--adv-gamma", "0.7071", "--n", "30", "--out", "adv.inst"],
        dir.path(),
    );
    assert_eq!(g.status.code(), Some(0));
    let out = matchkit(&["run", "--alg", "mcgregor", "--gamma", "0.7071", "adv.inst"], dir.path());
    let ratio = json(&out)["ratio_value"].as_f64().unwrap();
    assert!((5.82..=5.8285).contains(&ratio), "{ratio}");
}

#[test]
fn opt_and_certify() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "p3.inst", P3);
    let out = matchkit(&["opt", "p3.inst"], dir.path());
    assert_eq!(json(&out)["value"], 2.0);

    let out = matchkit(&["certify", "--alg", "alg2", "p3.inst"], dir.path());
    let r = json(&out);
    assert_eq!(r["certificate"]["kind"], "tree");
    assert_eq!(r["certificate"]["threshold"], "2");
    let code = out.status.code().unwrap();
    assert_eq!(code == 0, r["status"] == "pass");
    assert!(code == 0 || code == 3);
}

#[test]
fn sweep_csv_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        matchkit(&["sweep", "--kind", "growing-tree", "--n", "10", "--seeds", "0..0", "--alg", "alg2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("schema_version,row_kind,"));

    let out = matchkit(
        &[
            "sweep",
            "--kind",
            "growing-tree",
            "--max-weight",
            "100",
            "--n",
            "15",
            "--seeds",
            "0..4",
            "--alg",
            "mwm",
            "--p",
            "0.25,0.5",
            "--gamma1",
            "0,0.5",
            "--gamma2",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    // Header, then 4 cells of (4 runs + 1 summary).
    assert_eq!(text.lines().count(), 1 + 4 * 5);
    assert_eq!(text.lines().filter(|l| l.starts_with("1,summary,")).count(), 4);
}

#[test]
fn input_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.inst", "p match mcm 3 2\ne a b\ne a\n");
    let out = matchkit(&["run", "--alg", "alg1", "bad.inst"], dir.path());
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    write(dir.path(), "p3.inst", P3);
    assert_eq!(matchkit(&["run", "--alg", "alg3", "p3.inst"], dir.path()).status.code(), Some(4));
    assert_eq!(matchkit(&["run", "--alg", "alg3", "--epsilon", "-1/4", "p3.inst"], dir.path()).status.code(), Some(4));
    assert_eq!(matchkit(&["run", "--alg", "mwm", "--p", "2", "p3.inst"], dir.path()).status.code(), Some(4));
    assert_eq!(matchkit(&["run", "--alg", "alg1", "missing.inst"], dir.path()).status.code(), Some(4));
    assert_eq!(matchkit(&["frobnicate"], dir.path()).status.code(), Some(4));

    matchkit(&["gen", "--kind", "growing-tree", "--max-weight", "10", "--n", "5", "--out", "w.inst"], dir.path());
    assert_eq!(matchkit(&["run", "--alg", "alg2", "w.inst"], dir.path()).status.code(), Some(4));
}

#[test]
fn sampled_run_reports_index() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "p3.inst", P3);
    let out = matchkit(&["run", "--alg", "alg2", "--sample", "7", "p3.inst"], dir.path());
    let r = json(&out);
    assert!(r["sampled_index"].as_u64().unwrap() < 3);
}
