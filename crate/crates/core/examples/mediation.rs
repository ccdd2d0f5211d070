//! Mediation on simulated rows where the treatment acts only through r_trend.

use rand_distr::{Distribution, Normal};
use statlab::analysis::{mediate, MediationOptions, MediationRow};
use statlab::models::Category;
use statlab::rng::stream;

fn main() {
    let mut rng = stream(1, 0);
    let e = Normal::new(0.0, 0.1).unwrap();
    let rows: Vec<MediationRow> = (0..500)
        .map(|i| {
            let treated = (i % 2) as f64;
            let trend = 0.4 + 0.3 * treated + e.sample(&mut rng);
            MediationRow {
                treated,
                trend,
                variance: 0.5 + e.sample(&mut rng),
                seasonal: 0.8 + e.sample(&mut rng),
                smape: 0.1 + 0.6 * trend + e.sample(&mut rng),
                category: Category::NotRequired,
            }
        })
        .collect();
    let m = mediate(&rows, MediationOptions::default()).unwrap();
    for p in m.paths() {
        println!("{} {:<22} {:+.3} (p {:.2e})", p.path, p.relationship, p.coefficient, p.p_value);
    }
}
