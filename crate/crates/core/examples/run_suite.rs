//! A reduced factorial run written to a directory (first argument, default ./suite_out).

use statlab::harness::{run_suite, DatasetRef, ExperimentConfig};
use statlab::models::Family;

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "suite_out".into());
    let config = ExperimentConfig {
        datasets: ["seasonal", "random_walk", "multiplicative_variance"]
            .map(|d| DatasetRef::Standard(d.into()))
            .to_vec(),
        transforms: ["none", "difference", "boxcox"].map(|t| t.parse().unwrap()).to_vec(),
        families: vec![Family::AR, Family::HoltWinters],
        horizons: vec![4, 12],
        tuning_budget: 8,
        output_path: out.into(),
        ..ExperimentConfig::default()
    };
    let s = run_suite(&config).unwrap();
    println!("{} cells, {} ok -> {}", s.total, s.ok, s.records_path.display());
}
