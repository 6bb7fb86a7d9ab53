use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spanforge::catdsl::parse;
use spanforge_cli::{fixtures::catalog_files, run_all, Report};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spanforge"));
    c.env_remove("SPANFORGE_BUDGET");
    c
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn fixture(dir: &Path, name: &str) -> PathBuf {
    let (_, text) = catalog_files().into_iter().find(|(n, _)| n == name).unwrap();
    write(dir, name, &text)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn every_fixture_validates() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().arg("--fixtures").arg(dir.path()).output().unwrap();
    assert!(o.status.success());
    let files: Vec<PathBuf> = catalog_files().iter().map(|(n, _)| dir.path().join(n)).collect();
    let o = bin().arg("validate").args(&files).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn validate_reports_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.cat",
        "category c table { objects A  mor e: A->A  mor u: A->A  comp e.e = u  comp u.e = e  comp e.u = id_A  comp u.u = u }",
    );
    let o = bin().arg("validate").arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("NonAssociative"));
    let cospan = write(
        dir.path(),
        "cospan.cat",
        "category c = cospan\ntriple T on c { left: all; right: all }",
    );
    let o = bin().arg("validate").arg(&cospan).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("MissingPullback"));
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f1 = fixture(dir.path(), "f1.cat");
    let o = bin().args(["check", "--select", "unfurl"]).arg(&f1).output().unwrap();
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("[unfurl-cov] certified"));

    let local = fixture(dir.path(), "finset4_local.cat");
    let o = bin().arg("check").arg(&local).output().unwrap();
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS") && stdout(&o).contains("second triangle"));

    let missing = fixture(dir.path(), "no_left_adjoint.cat");
    let o = bin()
        .args(["check", "--select", "unfurl-co"])
        .arg(&missing)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("has no left adjoint"), "{}", stdout(&o));
}

#[test]
fn empty_task_list() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "pt.cat", "category pt { objects A }");
    let o = bin()
        .args(["check", "--format", "structured"])
        .arg(&p)
        .output()
        .unwrap();
    assert!(o.status.success());
    let r = Report::from_structured(&stdout(&o)).unwrap();
    assert!(r.tasks.is_empty() && r.passed);
}

#[test]
fn structured_ledger_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = fixture(dir.path(), "f0.cat");
    let out = dir.path().join("out");
    let o = bin()
        .args(["report", "--format", "structured", "--out"])
        .arg(&out)
        .arg(&p)
        .output()
        .unwrap();
    let text = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert_eq!(stdout(&o), text);
    let parsed = Report::from_structured(&text).unwrap();
    let ws = parse(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let in_memory = run_all(&[(p.display().to_string(), ws)], &[], 1);
    assert_eq!(parsed, in_memory);
    assert_eq!(o.status.success(), in_memory.passed);
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    let checks: usize = in_memory.tasks.iter().map(|t| t.checks.len()).sum();
    let marked = summary
        .lines()
        .filter(|l| l.starts_with("PASS ") || l.starts_with("FAIL "))
        .count();
    assert_eq!(marked, checks);
}

#[test]
fn output_is_stable_under_parallelism() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<PathBuf> = ["f1.cat", "galois.cat", "sq.cat", "sq_self_indexing.cat"]
        .iter()
        .map(|n| fixture(dir.path(), n))
        .collect();
    let run = |jobs: &str| {
        stdout(
            &bin()
                .args(["check", "--format", "structured", "--jobs", jobs])
                .args(&files)
                .output()
                .unwrap(),
        )
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert_eq!(one, run("1"));
}

#[test]
fn budget_from_environment_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "c.cat",
        "category c { objects A  gen e: A->A  rel e.e.e.e.e.e = id_A }",
    );
    let o = bin()
        .env("SPANFORGE_BUDGET", "3")
        .arg("validate")
        .arg(&p)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("budget of 3"));
    let o = bin()
        .env("SPANFORGE_BUDGET", "3")
        .args(["validate", "--budget", "20"])
        .arg(&p)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
}
