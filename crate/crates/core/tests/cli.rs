use std::fs;

use statlab::cli::{run, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};
use statlab::harness::{read_records, MANIFEST_FILE, RECORDS_FILE};
use statlab::series::TimeSeries;
use statlab::stationarity::StationarityReport;

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("statlab").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let (code, _, err) = call(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("Usage"));
    assert_eq!(call(&["run", "--bogus-flag"]).0, EXIT_USAGE);
    assert_eq!(call(&["--help"]).0, EXIT_OK);
}

#[test]
fn analyze_without_records_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.jsonl");
    let (code, _, err) = call(&["analyze", "--records", missing.to_str().unwrap()]);
    assert_eq!(code, EXIT_RUNTIME);
    assert!(err.starts_with("error:"));
}

#[test]
fn generate_prints_json_series() {
    let (code, out, _) = call(&["generate", "--datasets", "seasonal", "--seed", "3", "--length", "120"]);
    assert_eq!(code, EXIT_OK);
    let s = TimeSeries::from_json(out.trim()).unwrap();
    assert_eq!((s.name(), s.len(), s.frequency()), ("seasonal", 120, 52));
    assert_eq!(call(&["generate", "--datasets", "seasonal", "--seed", "3", "--length", "120"]).1, out);
    assert_eq!(call(&["generate", "--datasets", "nope"]).0, EXIT_RUNTIME);
}

#[test]
fn transform_and_stationarity_from_file() {
    let dir = tempfile::tempdir().unwrap();
    call(&["generate", "--datasets", "random_walk", "--out", dir.path().to_str().unwrap()]);
    let input = dir.path().join("random_walk.json");
    let (code, out, _) = call(&["transform", "--input", input.to_str().unwrap(), "--transforms", "difference"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(TimeSeries::from_json(out.trim()).unwrap().len(), 199);
    let (code, out, _) = call(&["stationarity", "--dataset", "linear_trend"]);
    assert_eq!(code, EXIT_OK);
    let report: StationarityReport = serde_json::from_str(&out).unwrap();
    assert!(report.r_trend() < 0.5);
    assert_eq!(call(&["transform", "--dataset", "seasonal", "--transforms", "cube"]).0, EXIT_USAGE);
}

#[test]
fn run_analyze_report_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results");
    let config = dir.path().join("cfg.json");
    let body = format!(
        r#"{{"datasets": ["random_walk", "seasonal"], "transforms": ["none", "difference"],
            "families": ["AR"], "horizons": [4, 12], "tuning_budget": 4, "output_path": {:?}}}"#,
        results.to_str().unwrap()
    );
    fs::write(&config, body).unwrap();
    let (code, _, err) = call(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(results.join(MANIFEST_FILE).exists());
    let records = read_records(&results.join(RECORDS_FILE)).unwrap();
    assert_eq!(records.len(), 8);

    // flags override the file
    let other = dir.path().join("other");
    let (code, _, _) = call(&[
        "run", "--config", config.to_str().unwrap(), "--out", other.to_str().unwrap(), "--horizons", "4",
        "--models", "ETS", "--workers", "1",
    ]);
    assert_eq!(code, EXIT_OK);
    let records = read_records(&other.join(RECORDS_FILE)).unwrap();
    assert_eq!(records.len(), 4);
    assert!(records.iter().all(|r| r.horizon == 4));

    let (code, _, _) = call(&["analyze", "--records", results.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(results.join("analysis").join("transform_comparison.csv").exists());
    let (code, md, _) = call(&["report", "--records", results.to_str().unwrap(), "--exclude-smape-unfriendly"]);
    assert_eq!(code, EXIT_OK);
    assert!(md.starts_with("# Transformation experiment report"));
    assert!(md.contains("| difference | 4 |"));
}
