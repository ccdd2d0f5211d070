//! Generate the eleven standard series and print a one-line profile of each.

use statlab::synthgen::{label, standard_suite};

fn main() {
    let suite = standard_suite(42, 200).expect("standard suite");
    for (id, s) in &suite {
        let v = s.values();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let (lo, hi) = v.iter().fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(*x), b.max(*x)));
        println!("{id:<24} {:<40} mean {mean:>8.2}  range [{lo:.2}, {hi:.2}]", label(id));
    }
}
