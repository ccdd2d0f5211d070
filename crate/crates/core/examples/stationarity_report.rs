//! Consensus stationarity of a random walk before and after differencing.

use statlab::stationarity::consensus;
use statlab::synthgen::{generate, standard_spec};
use statlab::transforms::fit_transform;

fn main() {
    let walk = generate(&standard_spec("random_walk", 200).unwrap(), 3).unwrap();
    let (diffed, _) = fit_transform(&walk, &"difference".parse().unwrap()).unwrap();
    for (name, s) in [("level", &walk), ("differenced", &diffed)] {
        let r = consensus(s).unwrap();
        println!("{name}: r_trend {:.2}  r_var {:.2}  r_seasonal {:.2}", r.r_trend(), r.r_var(), r.r_seasonal());
        for t in &r.tests {
            let stat = t.statistic.map_or("-".into(), |v| format!("{v:.3}"));
            println!("    {:<8} stat {stat:>9} stationary {:<5} counted {}", t.id.label(), t.stationary, t.included);
        }
    }
}
