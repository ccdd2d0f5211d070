//! Run a small design and print the markdown report of its records.

use statlab::analysis::{analyze, AnalysisOptions};
use statlab::harness::{read_records, run_suite, DatasetRef, ExperimentConfig};
use statlab::models::Family;

fn main() {
    let dir = std::env::temp_dir().join("statlab_analyze_example");
    let config = ExperimentConfig {
        datasets: ["linear_trend", "seasonal", "random_walk", "trend_seasonal"]
            .map(|d| DatasetRef::Standard(d.into()))
            .to_vec(),
        transforms: ["none", "difference", "seasonal_difference", "log"].map(|t| t.parse().unwrap()).to_vec(),
        families: vec![Family::AR, Family::ETS],
        horizons: vec![4, 12],
        tuning_budget: 6,
        output_path: dir.clone(),
        ..ExperimentConfig::default()
    };
    let summary = run_suite(&config).unwrap();
    let records = read_records(&summary.records_path).unwrap();
    let analysis = analyze(&records, AnalysisOptions::default()).unwrap();
    analysis.write(&dir.join("analysis")).unwrap();
    println!("{}", analysis.to_markdown());
}
