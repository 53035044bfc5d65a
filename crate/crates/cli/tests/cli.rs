use std::process::{Command, Output};

use hpcg_grb::bench::{cost_table, read_csv_records, CostRow, CsvRow, Report};
use hpcg_grb::problem::GridDims;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpcg-grb"))
        .args(args)
        .output()
        .expect("binary runs")
}

const SMALL: &[&str] = &["bench", "--nx", "8", "--ny", "8", "--nz", "8", "--levels", "3"];

#[test]
fn bench_json_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "bench",
        "--nx",
        "16",
        "--ny",
        "16",
        "--nz",
        "16",
        "--fixed-iters",
        "50",
        "--runs",
        "2",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = Report::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.runs.len(), 2);
    assert_eq!(report.config.levels, 4);
    for run in &report.runs {
        assert_eq!(run.iterations, 50);
        assert_eq!(run.levels.len(), 4);
    }
    assert!(report.symmetry.as_ref().unwrap().passed());
    assert_eq!(Report::from_json(&report.to_json().unwrap()).unwrap(), report);
}

#[test]
fn bench_csv_has_one_row_per_run_level_kernel() {
    let mut args = SMALL.to_vec();
    args.extend(["--runs", "3", "--fixed-iters", "4", "--format", "csv"]);
    let out = run(&args);
    assert!(out.status.success());
    let rows: Vec<CsvRow> = read_csv_records(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 3 * 3 * 2);
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.share)));
}

#[test]
fn cost_csv_round_trips() {
    let out = run(&[
        "cost", "--nx", "16", "--ny", "16", "--nz", "16", "--nodes", "1,2,4,8", "--format", "csv",
    ]);
    assert!(out.status.success());
    let rows: Vec<CostRow> = read_csv_records(out.stdout.as_slice()).unwrap();
    assert_eq!(rows, cost_table(GridDims::cube(16).unwrap(), &[1, 2, 4, 8]).unwrap());
    assert_eq!(rows[0].geometric_comm, 0.0);
    assert!(rows[1..].iter().all(|r| r.geometric_comm <= r.block_cyclic_comm));
}

#[test]
fn cost_json_and_table() {
    let out = run(&[
        "cost", "--nx", "16", "--ny", "16", "--nz", "16", "--nodes", "8", "--format", "json",
    ]);
    assert!(out.status.success());
    let rows: Vec<CostRow> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows[0].geometric_comm, 384.0);
    assert_eq!(rows[0].block_cyclic_comm, 3584.0);

    let out = run(&["cost", "--nx", "16", "--ny", "16", "--nz", "16", "--nodes", "8"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}

#[test]
fn dump_restriction_of_smallest_hierarchy() {
    let out = run(&[
        "dump",
        "--nx",
        "4",
        "--ny",
        "4",
        "--nz",
        "4",
        "--levels",
        "2",
        "--operator",
        "restriction",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("%%MatrixMarket"));
    assert_eq!(lines.next().unwrap(), "8 64 8");
    assert_eq!(lines.count(), 8);
}

#[test]
fn config_errors_exit_with_1() {
    let out = run(&["bench", "--nx", "8", "--ny", "8", "--nz", "8", "--levels", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension x"));

    let mut args = SMALL.to_vec();
    args.extend(["--runs", "0"]);
    assert_eq!(run(&args).status.code(), Some(1));

    assert_eq!(run(&["bench", "--nx", "8"]).status.code(), Some(1));
    assert_eq!(
        run(&["cost", "--nx", "16", "--ny", "16", "--nz", "16", "--nodes", "3"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn symmetry_failure_exits_with_2() {
    let mut args = SMALL.to_vec();
    args.extend(["--runs", "1", "--fixed-iters", "2", "--forward-only"]);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    args.push("--skip-symmetry");
    assert_eq!(run(&args).status.code(), Some(0));
}

#[test]
fn threads_flag_keeps_results_identical() {
    let history = |threads: &str| {
        let mut args = SMALL.to_vec();
        args.extend(["--runs", "1", "--rtol", "1e-8", "--threads", threads]);
        let out = run(&args);
        assert!(out.status.success());
        Report::from_json(std::str::from_utf8(&out.stdout).unwrap())
            .unwrap()
            .runs[0]
            .residual_history
            .clone()
    };
    assert_eq!(history("1"), history("4"));
}
