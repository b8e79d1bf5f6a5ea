use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_nurse-roster");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_simple_fixture_and_check_it() {
    let dir = tempfile::tempdir().unwrap();
    let roster = dir.path().join("roster.csv");
    let report = dir.path().join("report.jsonl");
    let o = run(&[
        "solve",
        "--instance",
        "simple-6x5",
        "--seed",
        "3",
        "--out",
        path(&roster),
        "--report",
        path(&report),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let line: serde_json::Value = serde_json::from_str(fs::read_to_string(&report).unwrap().trim()).unwrap();
    assert_eq!(line["seed"], 3);
    assert_eq!(line["feasibility"], 1.0);
    assert_eq!(line["converged"], true);

    let o = run(&["check", "--instance", "simple-6x5", "--roster", path(&roster)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("feasibility 100.0%"));
}

#[test]
fn solve_is_byte_identical_across_runs() {
    let a = run(&["solve", "--instance", "full-15x14", "--seed", "11"]);
    let b = run(&["solve", "--instance", "full-15x14", "--seed", "11"]);
    assert_eq!(a.status.code(), b.status.code());
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn infeasible_supply_exit_code() {
    let o = run(&["solve", "--instance", "infeasible-demand"]);
    assert_eq!(o.status.code(), Some(10));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("shift 1 ward 0 day 0: 3 required, 2 available"));
}

#[test]
fn phase1_exhausted_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("tight.txt");
    // one nurse who must work every day with k_max=2: no arrangement avoids a working window
    fs::write(&inst, "n=1\nD=3\nwards=1\ng_min=0\nk_max=2\n").unwrap();
    let o = run(&["solve", "--instance", path(&inst), "--phase1-cap", "50"]);
    assert_eq!(o.status.code(), Some(11));
}

#[test]
fn check_lists_hard_violations_and_cost() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.txt");
    let roster = dir.path().join("roster.csv");
    fs::write(&inst, "n=2\nD=3\nwards=1\ng_min=0\nk_max=3\n").unwrap();
    fs::write(&roster, "3,1,0\n3,3,2\n").unwrap();
    let o = run(&["check", "--instance", path(&inst), "--roster", path(&roster)]);
    assert_eq!(o.status.code(), Some(12));
    let out = stdout(&o);
    assert!(
        out.lines()
            .any(|l| l == "H5\t0\tdays 0-1\tnight shift followed by morning shift"),
        "{}",
        out
    );
    assert!(!out.lines().any(|l| l.starts_with("H5\t1")));
    // row 0: nothing priced; row 1: N-N-PM 500 + N-PM 25
    assert!(out.lines().any(|l| l == "objective 525"), "{}", out);
}

#[test]
fn check_rejects_shape_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let roster = dir.path().join("roster.csv");
    fs::write(&roster, "0,0\n").unwrap();
    let o = run(&["check", "--instance", "simple-6x5", "--roster", path(&roster)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_instance_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("bad.txt");
    fs::write(&inst, "n=1\nD=2\nwards=1\ng_min=0\nk_max=2\n[leave]\n0,0,0\n").unwrap();
    let o = run(&["solve", "--instance", path(&inst)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 7"));
}

fn bench_records(runs: &str, seed: &str, out: &Path) -> Vec<serde_json::Value> {
    let o = run(&[
        "bench",
        "--instance",
        "simple-6x5",
        "--runs",
        runs,
        "--seed",
        seed,
        "--out",
        path(out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("feasible runs"));
    fs::read_to_string(out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn without_timing(mut run: serde_json::Value) -> serde_json::Value {
    let r = run["run"].as_object_mut().unwrap();
    r.remove("phase1_seconds");
    r.remove("phase2_seconds");
    run
}

#[test]
fn bench_splits_into_halves() {
    let dir = tempfile::tempdir().unwrap();
    let whole = bench_records("6", "100", &dir.path().join("a.jsonl"));
    let first = bench_records("3", "100", &dir.path().join("b.jsonl"));
    let second = bench_records("3", "103", &dir.path().join("c.jsonl"));
    assert_eq!(whole.len(), 7);
    assert_eq!(whole.last().unwrap()["kind"], "summary");
    assert_eq!(whole.last().unwrap()["successes"], 6);
    let runs = |v: &[serde_json::Value]| -> Vec<serde_json::Value> {
        v.iter()
            .filter(|r| r["kind"] == "run")
            .cloned()
            .map(without_timing)
            .collect()
    };
    let mut halves = runs(&first);
    halves.extend(runs(&second));
    assert_eq!(runs(&whole), halves);
    let again = bench_records("6", "100", &dir.path().join("d.jsonl"));
    assert_eq!(runs(&whole), runs(&again));
}

#[test]
fn oracle_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("tiny.txt");
    fs::write(
        &inst,
        "n=2\nD=3\nwards=1\ng_min=0\nk_max=3\n[demand shift=1 ward=0]\n1,0,1\n",
    )
    .unwrap();
    let o = run(&["oracle", "--instance", path(&inst)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("status optimal"));
    assert!(out.lines().any(|l| l == "objective 0"), "{}", out);

    let o = run(&["oracle", "--instance", "infeasible-demand"]);
    assert_eq!(o.status.code(), Some(13));

    let o = run(&["oracle", "--instance", "simple-6x5"]);
    assert_eq!(o.status.code(), Some(1));
}
