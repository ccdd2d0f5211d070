//! Fit every model family with its default spec and score a 12-step forecast.

use statlab::metrics::evaluate;
use statlab::models::{fit, Family, ModelSpec};
use statlab::series::train_test_split;
use statlab::synthgen::{generate, standard_spec};

fn main() {
    let series = generate(&standard_spec("trend_seasonal", 200).unwrap(), 11).unwrap();
    let split = train_test_split(&series, 12).unwrap();
    for family in Family::ALL {
        let spec = ModelSpec::default_for(family);
        match fit(&spec, &split.train).and_then(|m| m.forecast(12)) {
            Ok(f) => {
                let m = evaluate(split.test.values(), &f.values, split.train.values()).unwrap();
                println!("{:<18} sMAPE {:.4}  RMSE {:.3}", family.to_string(), m.smape, m.rmse);
            }
            Err(e) => println!("{family}: {e}"),
        }
    }
}
