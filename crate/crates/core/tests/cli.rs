//! End-to-end checks of the `dgw` binary: exit codes, output formats, and
//! agreement between the CLI output and the frozen tables.

use dgw::table::DimTable;
use std::path::PathBuf;
use std::process::{Command, Output};

fn dgw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgw"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_prints_the_sorted_registry() {
    let o = dgw(&["list"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let names: Vec<&str> = out.lines().collect();
    assert_eq!(names.len(), 10);
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(names.contains(&"ext5_not_faithful"));
}

#[test]
fn compute_h_json_matches_the_frozen_table() {
    let o = dgw(&["compute", &data("koszul.dg"), "--op", "H", "--target", "B", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table: DimTable = serde_json::from_str(&stdout(&o)).expect("valid table JSON");
    let golden_text = std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden/koszul_tables.json"),
    )
    .unwrap();
    let golden: serde_json::Value = serde_json::from_str(&golden_text).unwrap();
    let expected: DimTable = serde_json::from_value(golden["h_table"].clone()).unwrap();
    assert_eq!(table, expected);
}

#[test]
fn compute_ext_with_negative_window_bounds() {
    let o = dgw(&[
        "compute",
        &data("koszul.dg"),
        "--op",
        "ext",
        "--args",
        "M,M",
        "--window",
        "-6:6:8",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("n\\d"), "table header present");
}

#[test]
fn tsv_marks_uncertified_entries() {
    let o = dgw(&["compute", &data("koszul.dg"), "--op", "H", "--target", "B", "--format", "tsv"]);
    assert!(o.status.success());
    let out = stdout(&o);
    // the window floor rows are uncertified; TSV renders the full window
    assert!(out.contains('?'), "uncertified cells carry a `?` suffix");
    assert!(out.lines().next().unwrap().starts_with("n\\d\t"));
}

#[test]
fn validate_accepts_the_sample_and_names_the_bad_generator() {
    let ok = dgw(&["validate", &data("koszul.dg")]);
    assert!(ok.status.success(), "{}", stderr(&ok));
    assert!(stdout(&ok).starts_with("ok:"));

    let bad = dgw(&["validate", &data("bad.dg")]);
    assert_eq!(bad.status.code(), Some(2));
    let err = stderr(&bad);
    assert!(err.contains("delta^2"), "reports the broken identity: {err}");
    assert!(err.contains('f'), "names the offending generator: {err}");
}

#[test]
fn scenario_all_passes_and_reports_json() {
    let o = dgw(&["scenario", "all", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let reports: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(reports.len(), 10);
    for r in &reports {
        assert_eq!(r["pass"], true, "{} failed", r["name"]);
        assert!(r["assertions"].as_array().unwrap().iter().all(|a| a["pass"] == true));
    }
}

#[test]
fn unknown_scenario_is_a_usage_error() {
    let o = dgw(&["scenario", "no_such_thing"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no_such_thing"));
}

#[test]
fn malformed_window_is_a_usage_error() {
    let o = dgw(&["compute", &data("koszul.dg"), "--op", "H", "--target", "B", "--window", "1:2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("window"));
}

#[test]
fn missing_file_is_a_compute_error() {
    let o = dgw(&["compute", "/nonexistent/input.dg", "--op", "H", "--target", "B"]);
    assert_eq!(o.status.code(), Some(3));
}
