//! Run the design on a series read from CSV instead of the synthetic suite.

use statlab::harness::{run_suite, DatasetRef, ExperimentConfig};
use statlab::models::Family;
use statlab::series::write_csv;
use statlab::synthgen::{generate, standard_spec};

fn main() {
    let dir = std::env::temp_dir().join("statlab_csv_example");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("monthly.csv");
    // stand-in for real data: a positive trending series with a monthly cycle
    let mut spec = standard_spec("trend_seasonal", 144).unwrap();
    spec.seasonal_period = 12;
    let raw = generate(&spec, 9).unwrap();
    let sales = raw.derive(raw.values().iter().map(|v| v + 40.0).collect()).unwrap();
    write_csv(&sales, &path, "sales").unwrap();

    let config = ExperimentConfig {
        datasets: vec![DatasetRef::Csv {
            name: "monthly_sales".into(),
            path,
            column: "sales".into(),
            frequency: 12,
        }],
        transforms: ["none", "seasonal_difference", "log+difference"].map(|t| t.parse().unwrap()).to_vec(),
        families: vec![Family::ETS, Family::ProphetLike],
        horizons: vec![6, 12],
        tuning_budget: 6,
        output_path: dir.join("results"),
        ..ExperimentConfig::default()
    };
    let s = run_suite(&config).unwrap();
    println!("{} of {} cells ok; records in {}", s.ok, s.total, s.records_path.display());
}
