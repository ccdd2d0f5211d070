use std::fs;

use statlab::harness::{
    cell_seed, read_records, run_experiment, run_suite, run_suite_partial, DatasetRef, ExperimentConfig, Status,
    CSV_FILE, JOURNAL_FILE, MANIFEST_FILE, RECORDS_FILE,
};
use statlab::models::Family;
use statlab::synthgen::standard_suite;
use statlab::transforms::PipelineSpec;

fn dataset(id: &str) -> statlab::series::TimeSeries {
    standard_suite(42, 200)
        .unwrap()
        .into_iter()
        .find(|(name, _)| name == id)
        .unwrap()
        .1
}

fn small_config(dir: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig {
        datasets: vec![
            DatasetRef::Standard("linear_trend".into()),
            DatasetRef::Standard("seasonal".into()),
        ],
        transforms: ["none", "difference", "log"].iter().map(|t| t.parse().unwrap()).collect(),
        families: vec![Family::AR, Family::ETS],
        horizons: vec![4, 12],
        tuning_budget: 5,
        output_path: dir.to_path_buf(),
        ..ExperimentConfig::default()
    }
}

#[test]
fn linear_trend_smoke() {
    let r = run_experiment(&dataset("linear_trend"), &PipelineSpec::none(), Family::AR, 4, 7, 50);
    assert_eq!(r.status, Status::Ok, "{:?}", r.error);
    let s = r.smape().unwrap();
    assert!(s.is_finite() && (0.0..=2.0).contains(&s));
    assert!(r.stationarity.is_some());
    assert!(r.tuned_spec.is_some());
}

#[test]
fn boxcox_overflow_is_inverse_failed() {
    let transform: PipelineSpec = "boxcox".parse().unwrap();
    let seed = cell_seed(42, "seasonal", "boxcox", Family::ARIMA, 12);
    let r = run_experiment(&dataset("seasonal"), &transform, Family::ARIMA, 12, seed, 50);
    assert_eq!(r.status, Status::InverseFailed);
    assert!(r.metrics.is_none());
    assert!(r.stationarity.is_some());
    assert!(r.error.unwrap().contains("boxcox"));
}

#[test]
fn log_of_negative_series_is_transform_failed() {
    let transform: PipelineSpec = "log".parse().unwrap();
    let r = run_experiment(&dataset("baseline"), &transform, Family::AR, 4, 1, 5);
    assert_eq!(r.status, Status::TransformFailed);
    assert!(r.metrics.is_none() && r.stationarity.is_none() && r.tuned_spec.is_none());
}

#[test]
fn same_inputs_same_record() {
    let d = dataset("trend_seasonal");
    let t: PipelineSpec = "boxcox+difference".parse().unwrap();
    let a = run_experiment(&d, &t, Family::HoltWinters, 12, 3, 10);
    let b = run_experiment(&d, &t, Family::HoltWinters, 12, 3, 10);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn tiny_cross_product() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        datasets: vec![DatasetRef::Standard("random_walk".into())],
        transforms: vec![PipelineSpec::none(), "difference".parse().unwrap()],
        families: vec![Family::ARIMA],
        horizons: vec![4],
        output_path: dir.path().to_path_buf(),
        ..ExperimentConfig::default()
    };
    let summary = run_suite(&config).unwrap();
    assert!(summary.complete);
    let records = read_records(&summary.records_path).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0].transform_id, "difference");
    assert_eq!(records[1].transform_id, "none");
    assert!(dir.path().join(MANIFEST_FILE).exists());
    assert!(dir.path().join(CSV_FILE).exists());
    assert!(!dir.path().join(JOURNAL_FILE).exists());
}

#[test]
fn records_sorted_and_counted() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    run_suite(&config).unwrap();
    let records = read_records(&dir.path().join(RECORDS_FILE)).unwrap();
    assert_eq!(records.len(), config.cell_count());
    assert_eq!(records.len(), 24);
    let keys: Vec<_> = records.iter().map(|r| r.key()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    for r in &records {
        assert_eq!(r.status == Status::Ok, r.metrics.is_some());
        if let Some(s) = r.smape() {
            assert!((0.0..=2.0).contains(&s));
        }
    }
    let csv = fs::read_to_string(dir.path().join(CSV_FILE)).unwrap();
    assert_eq!(csv.lines().count(), 25);
    assert!(csv.starts_with("dataset_id,transform_id,model_family,category,horizon,seed,status,smape"));
}

#[test]
fn worker_count_does_not_change_output() {
    let one = tempfile::tempdir().unwrap();
    let many = tempfile::tempdir().unwrap();
    let mut a = small_config(one.path());
    a.workers = Some(1);
    let mut b = small_config(many.path());
    b.workers = Some(4);
    run_suite(&a).unwrap();
    run_suite(&b).unwrap();
    let read = |d: &std::path::Path, f: &str| fs::read(d.join(f)).unwrap();
    assert_eq!(read(one.path(), RECORDS_FILE), read(many.path(), RECORDS_FILE));
    assert_eq!(read(one.path(), CSV_FILE), read(many.path(), CSV_FILE));
}

#[test]
fn interrupted_run_resumes_to_same_file() {
    let straight = tempfile::tempdir().unwrap();
    let resumed = tempfile::tempdir().unwrap();
    run_suite(&small_config(straight.path())).unwrap();

    let config = small_config(resumed.path());
    let first = run_suite_partial(&config, Some(9)).unwrap();
    assert!(!first.complete);
    assert_eq!(first.executed, 9);
    assert!(!resumed.path().join(RECORDS_FILE).exists());
    // a torn line at the end of the journal is skipped
    let journal = resumed.path().join(JOURNAL_FILE);
    let mut text = fs::read_to_string(&journal).unwrap();
    text.push_str("{\"fingerprint\":\"trunc");
    fs::write(&journal, text).unwrap();

    let second = run_suite(&config).unwrap();
    assert!(second.complete);
    assert_eq!(second.resumed, 9);
    assert_eq!(second.executed, 15);
    assert_eq!(
        fs::read_to_string(straight.path().join(RECORDS_FILE)).unwrap(),
        fs::read_to_string(resumed.path().join(RECORDS_FILE)).unwrap()
    );
}

#[test]
fn invalid_configs_rejected() {
    let mut c = ExperimentConfig::default();
    c.horizons = vec![0];
    assert!(c.validate().is_err());
    let mut c = ExperimentConfig::default();
    c.datasets.push(DatasetRef::Standard("linear_trend".into()));
    assert!(c.validate().is_err());
    let mut c = ExperimentConfig::default();
    c.datasets = vec![DatasetRef::Standard("nope".into())];
    assert!(c.validate().is_err());
    assert_eq!(ExperimentConfig::default().cell_count(), 3234);
}

#[test]
fn config_json_round_trip() {
    let text = r#"{"datasets": ["seasonal", {"name": "air", "path": "air.csv", "column": "y", "frequency": 12}],
                   "transforms": ["none", "log+difference"], "families": ["AR"], "horizons": [4], "seed": 9}"#;
    let c: ExperimentConfig = serde_json::from_str(text).unwrap();
    assert_eq!(c.datasets[1].id(), "air");
    assert_eq!(c.tuning_budget, 50);
    assert_eq!(c.cell_count(), 4);
    assert!(serde_json::from_str::<ExperimentConfig>(r#"{"bogus": 1}"#).is_err());
}
