//! One cell of the design: dataset, transform, model family and horizon.

use statlab::harness::{cell_seed, run_experiment};
use statlab::models::Family;
use statlab::synthgen::{generate, standard_spec};

fn main() {
    let data = generate(&standard_spec("random_walk_drift", 200).unwrap(), 42).unwrap();
    for transform in ["none", "difference", "fractional_difference"] {
        let spec = transform.parse().unwrap();
        let seed = cell_seed(42, "random_walk_drift", transform, Family::ETS, 12);
        let r = run_experiment(&data, &spec, Family::ETS, 12, seed, 20);
        let s = r.stationarity.as_ref().map(|s| s.r_trend());
        println!("{transform:<22} {:?} sMAPE {:?} r_trend {:?}", r.status, r.smape(), s);
    }
}
