//! End-to-end checks of the command line binary: argument handling, exit
//! codes, CSV and JSON output shapes, and file input/output.

use std::process::{Command, Output};

use approx::assert_relative_eq;

/// Reference value of the first fundamental solution at p = 3,
/// alpha = (1/4, 1/4, 1/4), mu = 0, x = (1,1,1), x0 = (2,1,1) with the
/// closed-form leading normalization constant.
const REFERENCE_VALUE: f64 = 0.10674530214373109;

/// The closed-form leading normalization constant for the same parameters.
const FIRST_CONSTANT: f64 = 0.98514394625648805;

const REFERENCE_ROW: &str = "1,1,1,1,2,1,1";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helmsol"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf8")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited normally")
}

/// Splits CSV text into rows of cells, dropping the header line.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn cell(row: &[String], idx: usize) -> f64 {
    row[idx].parse().unwrap_or_else(|_| panic!("cell {idx} not numeric: {row:?}"))
}

#[test]
fn eval_row_matches_the_reference_value() {
    let out = run(&["eval", "--row", REFERENCE_ROW]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("i,x1,x2,x3,x01,x02,x03,value,path,tail,level,error"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "1");
    assert_relative_eq!(cell(&rows[0], 7), REFERENCE_VALUE, max_relative = 1e-9);
    assert_eq!(rows[0][8], "transformed");
    assert!(rows[0][11].is_empty(), "error column should be empty: {:?}", rows[0]);
}

#[test]
fn explicit_constants_scale_the_solution_linearly() {
    let auto = run(&["eval", "--row", REFERENCE_ROW]);
    let ones = run(&["--k", "1,1,1,1,1,1,1,1", "eval", "--row", REFERENCE_ROW]);
    assert_eq!(code(&auto), 0);
    assert_eq!(code(&ones), 0);
    let va = cell(&csv_rows(&stdout(&auto))[0], 7);
    let vo = cell(&csv_rows(&stdout(&ones))[0], 7);
    // the solution is linear in its leading constant, so the ratio of the
    // two runs recovers the closed-form value exactly
    assert_relative_eq!(va / vo, FIRST_CONSTANT, max_relative = 1e-12);
}

#[test]
fn coincident_points_fail_the_row_but_not_the_run() {
    let out = run(&["eval", "--row", REFERENCE_ROW, "--row", "1,1,1,1,1,1,1"]);
    assert_eq!(code(&out), 2);
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    assert_relative_eq!(cell(&rows[0], 7), REFERENCE_VALUE, max_relative = 1e-9);
    assert!(rows[1][7].is_empty(), "failed row should have no value: {:?}", rows[1]);
    assert!(rows[1][11].contains("source point"), "row error: {:?}", rows[1]);
}

#[test]
fn invalid_strength_is_rejected_up_front() {
    let out = run(&["--alpha", "0.6,0.25,0.25", "eval", "--row", REFERENCE_ROW]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("0 < 2*alpha < 1"), "stderr: {}", stderr(&out));
}

#[test]
fn missing_rows_are_an_input_error() {
    let out = run(&["eval"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("no input rows"), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_flags_exit_nonzero_and_help_exits_zero() {
    let bad = run(&["--definitely-not-a-flag", "eval"]);
    assert_eq!(code(&bad), 1);
    let help = run(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(stdout(&help).contains("Usage"));
}

#[test]
fn json_output_carries_the_configuration_and_rows() {
    let out = run(&["--format", "json", "eval", "--row", REFERENCE_ROW]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(doc["config"]["p"], 3);
    assert_relative_eq!(
        doc["config"]["k"][0].as_f64().unwrap(),
        FIRST_CONSTANT,
        max_relative = 1e-12
    );
    let row = &doc["rows"][0];
    assert_relative_eq!(row["value"].as_f64().unwrap(), REFERENCE_VALUE, max_relative = 1e-9);
    assert_eq!(row["path"], "transformed");
}

#[test]
fn input_files_merge_with_flag_rows_and_output_lands_in_the_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let input = dir.path().join("rows.txt");
    let output = dir.path().join("out.csv");
    std::fs::write(&input, "# comment line\n\n2,0.3,0.4,0.5,1.1,0.9,1.2\n").expect("write input");
    let out = run(&[
        "--in",
        input.to_str().unwrap(),
        "--out",
        output.to_str().unwrap(),
        "eval",
        "--row",
        REFERENCE_ROW,
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).is_empty(), "output should go to the file");
    let text = std::fs::read_to_string(&output).expect("output file written");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2, "flag row plus one file row");
    for row in &rows {
        assert!(row[11].is_empty(), "row should succeed: {row:?}");
        assert!(cell(row, 7).is_finite());
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["--mu", "1", "eval", "--row", REFERENCE_ROW, "--row", "3,0.2,0.3,0.4,0.9,1.0,1.1"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn points_outside_every_representation_fail_fast() {
    // mu < 0 makes the fourth argument positive, which rules out the
    // integral route; far from the source the direct series is out too, and
    // the transformed arguments land outside the decomposition region, so
    // the row must come back as a prompt domain error rather than a stall
    let out = run(&["--mu", "-0.5", "eval", "--row", REFERENCE_ROW]);
    assert_eq!(code(&out), 2);
    let rows = csv_rows(&stdout(&out));
    assert!(rows[0][7].is_empty(), "row should carry no value: {:?}", rows[0]);
    assert!(rows[0][11].contains("outside the unit region"), "row error: {:?}", rows[0]);
}

#[test]
fn system_rows_are_second_order_for_every_equation() {
    let out = run(&["system", "--args", "0.1,0.12,0.09,0.2"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("equation,residual,normalized_residual,order,error"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4);
    for (r, row) in rows.iter().enumerate() {
        assert!(row[4].is_empty(), "equation {} failed: {row:?}", r + 1);
        assert!(
            (cell(row, 3) - 2.0).abs() < 0.3,
            "equation {} order {} not second order",
            r + 1,
            row[3]
        );
    }
}

#[test]
fn residual_subcommand_reports_quadratic_convergence() {
    let out = run(&["--mu", "1", "residual", "--h0", "4e-3", "--row", "1,1,1,2,1,1"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    assert!(rows[0][11].is_empty(), "row failed: {:?}", rows[0]);
    assert!(cell(&rows[0], 9).abs() < 1e-4, "normalized residual too large: {:?}", rows[0]);
    assert!((cell(&rows[0], 10) - 2.0).abs() < 0.3, "order: {:?}", rows[0]);
}

#[test]
fn singularity_slope_tracks_the_dimension() {
    for (p, x0, expected) in [("3", "1,1,1", -1.0), ("4", "1,1,1,0.2", -2.0)] {
        let out = run(&["--p", p, "singularity", "--x0", x0]);
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
        let rows = csv_rows(&stdout(&out));
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert!(row[4].is_empty(), "fit failed: {row:?}");
        assert!((cell(row, 0) - expected).abs() < 0.05, "slope at p = {p}: {row:?}");
        assert_relative_eq!(cell(row, 1), expected);
        assert_relative_eq!(cell(row, 2), cell(row, 3), max_relative = 1e-3);
    }
}

#[test]
fn selftest_passes_for_multiple_seeds() {
    for seed in ["42", "7"] {
        let out = run(&["--seed", seed, "selftest"]);
        assert_eq!(code(&out), 0, "seed {seed} stderr: {}", stderr(&out));
        assert!(stdout(&out).trim_end().ends_with("selftest passed"), "seed {seed}");
    }
}
