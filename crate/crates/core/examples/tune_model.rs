//! Budgeted hyperparameter search for one family.

use statlab::models::{grid, tune, Family};
use statlab::synthgen::{generate, standard_spec};

fn main() {
    let series = generate(&standard_spec("trend_autoregressive", 200).unwrap(), 5).unwrap();
    for family in [Family::ARIMA, Family::GradientBoosting] {
        let out = tune(family, &series, 10, 42).unwrap();
        println!(
            "{family}: {} of {} candidates scored, best {:.4} with {}",
            out.evaluated,
            grid(family).len(),
            out.score,
            out.spec.to_json()
        );
    }
}
