use std::path::Path;
use std::process::{Command, Output};

fn seqfed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqfed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn run_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let summary = dir.path().join("summary.md");
    let o = seqfed(&[
        "run",
        &config("group3.conf"),
        "--set",
        "rounds=5",
        "--set",
        "seeds=0..2",
        "--out",
        csv.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    // header + 2 methods × 2 seeds × 6 rounds
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 6);
    assert!(text.starts_with("method,task,seed,round,lr"));
    assert!(std::fs::read_to_string(&summary)
        .unwrap()
        .contains("group3"));
}

#[test]
fn grid_reports_the_selected_rate() {
    let o = seqfed(&[
        "grid",
        &config("group3.conf"),
        "--set",
        "rounds=5",
        "--set",
        "lr_grid=0.01, 0.1",
        "--set",
        "seeds=0",
    ]);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("best lr for SFL") && err.contains("best lr for PFL"),
        "{err}"
    );
}

#[test]
fn bounds_table_formats() {
    let md = seqfed(&[
        "bounds",
        "--sigma",
        "1",
        "--zeta-star",
        "1",
        "--m",
        "4",
        "--k",
        "2",
        "--r",
        "10",
        "--crossover",
    ]);
    assert!(md.status.success());
    let text = stdout(&md);
    assert!(text.starts_with('|'));
    assert!(text.contains("crossover heterogeneity"));
    let csv = seqfed(&["bounds", "--format", "csv", "--m", "4", "--eff-lr", "0.1"]);
    assert!(csv.status.success());
    assert!(stdout(&csv).starts_with("case,method,assumption"));
    assert!(stdout(&csv).contains("SFL theorem"));
}

#[test]
fn lemmas_pass() {
    let o = seqfed(&["lemmas"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("PASS")).count(),
        6,
        "{text}"
    );
}

#[test]
fn parse_validates_libsvm() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    std::fs::write(&good, "+1 1:0.5 3:1\n-1 2:2\n").unwrap();
    let o = seqfed(&["parse", good.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("2 samples, dimension 3"));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "+1 3:abc\n").unwrap();
    let o = seqfed(&["parse", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("line 1, column 4"));
}

#[test]
fn usage_errors_exit_with_two() {
    let o = seqfed(&["run", "/nonexistent/experiment.conf"]);
    assert_eq!(o.status.code(), Some(2));
    let o = seqfed(&["run", &config("group3.conf"), "--set", "rounds"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn figure2_writes_its_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig");
    let o = seqfed(&[
        "figure2",
        "--out",
        out.to_str().unwrap(),
        "--rounds",
        "5",
        "--seeds",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "group1.csv",
        "group10.csv",
        "summary.md",
        "figure2.svg",
        "manifest.txt",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(stdout(&o).contains("| 10 |"));
}
