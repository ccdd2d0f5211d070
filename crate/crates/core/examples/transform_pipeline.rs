//! Fit a pipeline on training data, then map transformed-scale forecasts back.

use statlab::series::train_test_split;
use statlab::synthgen::{generate, standard_spec};
use statlab::transforms::{fit_transform, inverse_transform, PipelineSpec};

fn main() {
    let series = generate(&standard_spec("trend_seasonal", 200).unwrap(), 7).unwrap();
    let split = train_test_split(&series, 12).unwrap();
    let spec: PipelineSpec = "boxcox+seasonal_difference".parse().unwrap();
    let (z, state) = fit_transform(&split.train, &spec).unwrap();
    println!("{spec}: {} -> {} observations, warm-up {}", split.train.len(), z.len(), state.warm_up);
    if let Some((lambda, shift)) = state.boxcox_params() {
        println!("lambda {lambda:.3}, shift {shift:.3}");
    }

    // a seasonal naive forecast on the transformed scale: repeat the last cycle
    let zv = z.values();
    let naive: Vec<f64> = (0..12).map(|h| zv[zv.len() - 52 + h]).collect();
    let back = inverse_transform(&naive, &state).unwrap();
    for (f, a) in back.iter().zip(split.test.values()) {
        println!("{f:>9.3} {a:>9.3}");
    }
}
