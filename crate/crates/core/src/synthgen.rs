//! Synthetic data-generating processes.
//!
//! Each series is `y_t = beta*t + A*sin(2*pi*t/P) + eps_t` for `t = 1..=n`,
//! where the noise term is iid, has a deterministic time-varying scale, or
//! follows an AR(2) recursion. Random-walk specs replace the whole form by
//! `y_t = y_{t-1} + drift + eta_t` with `y_0 = 0`.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;
use crate::series::{Origin, TimeSeries};

/// Discarded AR(2) steps before the first kept observation.
pub const AR_BURN_IN: usize = 100;
/// Lower bound on the multiplicative noise scale.
pub const MULTIPLICATIVE_FLOOR: f64 = 1e-6;
/// Observations per seasonal cycle for weekly data with annual seasonality.
pub const WEEKLY_FREQUENCY: usize = 52;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid DGP spec '{name}': {reason}")]
    InvalidSpec { name: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseMode {
    Iid { sigma: f64 },
    /// Standard deviation linear in `t`, from `sigma_start` at `t=1` to `sigma_end` at `t=n`.
    Increasing { sigma_start: f64, sigma_end: f64 },
    /// Standard deviation `c * |beta*t|`.
    Multiplicative { c: f64 },
    Ar2 { phi1: f64, phi2: f64, sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StochasticTrend {
    None,
    RandomWalk { drift: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub name: String,
    pub trend_slope: f64,
    pub seasonal_amplitude: f64,
    pub seasonal_period: usize,
    pub noise: NoiseMode,
    pub stochastic_trend: StochasticTrend,
    pub length: usize,
}

impl DgpSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |reason: &str| {
            Err(SynthError::InvalidSpec {
                name: self.name.clone(),
                reason: reason.to_string(),
            })
        };
        if self.length < 10 {
            return bad("length must be at least 10");
        }
        if self.seasonal_amplitude != 0.0 && self.seasonal_period < 2 {
            return bad("seasonal period must be at least 2");
        }
        let sigmas_ok = match self.noise {
            NoiseMode::Iid { sigma } => sigma >= 0.0,
            NoiseMode::Increasing { sigma_start, sigma_end } => sigma_start >= 0.0 && sigma_end >= 0.0,
            NoiseMode::Multiplicative { c } => c >= 0.0,
            NoiseMode::Ar2 { sigma, .. } => sigma >= 0.0,
        };
        if !sigmas_ok {
            return bad("noise scales must be non-negative");
        }
        if let StochasticTrend::RandomWalk { .. } = self.stochastic_trend {
            if self.trend_slope != 0.0 || self.seasonal_amplitude != 0.0 {
                return bad("random-walk specs carry no deterministic trend or seasonality");
            }
            if !matches!(self.noise, NoiseMode::Iid { .. }) {
                return bad("random-walk specs take iid innovations");
            }
        }
        let finite = [self.trend_slope, self.seasonal_amplitude].iter().all(|v| v.is_finite());
        if !finite {
            return bad("parameters must be finite");
        }
        Ok(())
    }

    /// Deterministic part `beta*t + A*sin(2*pi*t/P)` at 1-based time `t`.
    pub fn deterministic(&self, t: usize) -> f64 {
        let t = t as f64;
        let seasonal = if self.seasonal_amplitude == 0.0 {
            0.0
        } else {
            self.seasonal_amplitude * (2.0 * PI * t / self.seasonal_period as f64).sin()
        };
        self.trend_slope * t + seasonal
    }
}

/// Draws one series. Identical `(spec, seed)` pairs give bit-identical output.
pub fn generate(spec: &DgpSpec, seed: u64) -> Result<TimeSeries, SynthError> {
    spec.validate()?;
    let mut rng = rng::stream(seed, 0);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let n = spec.length;

    let values: Vec<f64> = match spec.stochastic_trend {
        StochasticTrend::RandomWalk { drift } => {
            let sigma = match spec.noise {
                NoiseMode::Iid { sigma } => sigma,
                _ => unreachable!("validated"),
            };
            let mut level = 0.0;
            (0..n)
                .map(|_| {
                    level += drift + sigma * draw();
                    level
                })
                .collect()
        }
        StochasticTrend::None => {
            let noise: Vec<f64> = match spec.noise {
                NoiseMode::Iid { sigma } => (0..n).map(|_| sigma * draw()).collect(),
                NoiseMode::Increasing { sigma_start, sigma_end } => (1..=n)
                    .map(|t| {
                        let frac = (t - 1) as f64 / (n - 1) as f64;
                        (sigma_start + (sigma_end - sigma_start) * frac) * draw()
                    })
                    .collect(),
                NoiseMode::Multiplicative { c } => (1..=n)
                    .map(|t| {
                        let trend = spec.trend_slope * t as f64;
                        (c * trend.abs()).max(MULTIPLICATIVE_FLOOR) * draw()
                    })
                    .collect(),
                NoiseMode::Ar2 { phi1, phi2, sigma } => {
                    let (mut prev1, mut prev2) = (0.0, 0.0);
                    let mut out = Vec::with_capacity(n);
                    for step in 0..AR_BURN_IN + n {
                        let e = phi1 * prev1 + phi2 * prev2 + sigma * draw();
                        prev2 = prev1;
                        prev1 = e;
                        if step >= AR_BURN_IN {
                            out.push(e);
                        }
                    }
                    out
                }
            };
            noise
                .iter()
                .enumerate()
                .map(|(i, e)| spec.deterministic(i + 1) + e)
                .collect()
        }
    };

    TimeSeries::with_origin(
        spec.name.clone(),
        WEEKLY_FREQUENCY,
        values,
        Origin::Synthetic(spec.name.clone()),
    )
    .map_err(|e| SynthError::InvalidSpec {
        name: spec.name.clone(),
        reason: e.to_string(),
    })
}

/// Dataset ids of the standard suite, in generation order.
pub const STANDARD_IDS: [&str; 11] = [
    "baseline",
    "linear_trend",
    "seasonal",
    "increasing_variance",
    "multiplicative_variance",
    "trend_seasonal",
    "all_components",
    "autoregressive",
    "trend_autoregressive",
    "random_walk",
    "random_walk_drift",
];

/// The eleven specs of the standard suite with length `n`.
pub fn standard_specs(n: usize) -> Vec<DgpSpec> {
    const BETA: f64 = 0.5;
    const AMP: f64 = 10.0;
    const P: usize = 52;
    let iid = NoiseMode::Iid { sigma: 1.0 };
    let mult = NoiseMode::Multiplicative { c: 0.15 };
    let ar2 = NoiseMode::Ar2 {
        phi1: 0.6,
        phi2: 0.2,
        sigma: 1.0,
    };
    let spec = |name: &str, beta: f64, amp: f64, noise: NoiseMode, st: StochasticTrend| DgpSpec {
        name: name.to_string(),
        trend_slope: beta,
        seasonal_amplitude: amp,
        seasonal_period: P,
        noise,
        stochastic_trend: st,
        length: n,
    };
    let none = StochasticTrend::None;
    vec![
        spec("baseline", 0.0, 0.0, iid, none),
        spec("linear_trend", BETA, 0.0, iid, none),
        spec("seasonal", 0.0, AMP, iid, none),
        spec(
            "increasing_variance",
            0.0,
            0.0,
            NoiseMode::Increasing {
                sigma_start: 1.0,
                sigma_end: 5.0,
            },
            none,
        ),
        spec("multiplicative_variance", BETA, 0.0, mult, none),
        spec("trend_seasonal", BETA, AMP, iid, none),
        spec("all_components", BETA, AMP, mult, none),
        spec("autoregressive", 0.0, 0.0, ar2, none),
        spec("trend_autoregressive", BETA, 0.0, ar2, none),
        spec("random_walk", 0.0, 0.0, iid, StochasticTrend::RandomWalk { drift: 0.0 }),
        spec("random_walk_drift", 0.0, 0.0, iid, StochasticTrend::RandomWalk { drift: 0.1 }),
    ]
}

/// Generates the standard suite. Dataset `i` uses sub-seed stream `i` of `seed`.
pub fn standard_suite(seed: u64, n: usize) -> Result<Vec<(String, TimeSeries)>, SynthError> {
    standard_specs(n)
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let sub_seed = rng::derive_seed(seed, &["dataset", &i.to_string()]);
            generate(spec, sub_seed).map(|s| (spec.name.clone(), s))
        })
        .collect()
}

/// Looks up a standard-suite spec by id.
pub fn standard_spec(id: &str, n: usize) -> Option<DgpSpec> {
    standard_specs(n).into_iter().find(|s| s.name == id)
}

/// Table-style label for a standard dataset id.
pub fn label(id: &str) -> &str {
    match id {
        "baseline" => "Baseline",
        "linear_trend" => "Linear trend",
        "seasonal" => "Seasonal",
        "increasing_variance" => "Increasing variance",
        "multiplicative_variance" => "Multiplicative var.",
        "trend_seasonal" => "Trend+seasonal",
        "all_components" => "All components",
        "autoregressive" => "Autoregressive",
        "trend_autoregressive" => "Trend+autoregressive",
        "random_walk" => "Random walk",
        "random_walk_drift" => "Random walk+drift",
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ols_slope(y: &[f64]) -> f64 {
        let n = y.len() as f64;
        let tbar = (n + 1.0) / 2.0;
        let ybar = y.iter().sum::<f64>() / n;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (i, v) in y.iter().enumerate() {
            let dt = (i + 1) as f64 - tbar;
            sxy += dt * (v - ybar);
            sxx += dt * dt;
        }
        sxy / sxx
    }

    fn acf(y: &[f64], lag: usize) -> f64 {
        let n = y.len();
        let m = y.iter().sum::<f64>() / n as f64;
        let den: f64 = y.iter().map(|v| (v - m).powi(2)).sum();
        let num: f64 = (lag..n).map(|t| (y[t] - m) * (y[t - lag] - m)).sum();
        num / den
    }

    fn base(name: &str) -> DgpSpec {
        DgpSpec {
            name: name.into(),
            trend_slope: 0.0,
            seasonal_amplitude: 0.0,
            seasonal_period: 52,
            noise: NoiseMode::Iid { sigma: 0.0 },
            stochastic_trend: StochasticTrend::None,
            length: 50,
        }
    }

    #[test]
    fn noise_free_degenerate_is_zero() {
        let s = generate(&base("zero"), 3).unwrap();
        assert_eq!(s.len(), 50);
        assert!(s.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn components_add_exactly_without_noise() {
        let mut spec = base("det");
        spec.trend_slope = 0.5;
        spec.seasonal_amplitude = 10.0;
        spec.length = 200;
        let s = generate(&spec, 1).unwrap();
        for (i, v) in s.values().iter().enumerate() {
            let t = (i + 1) as f64;
            let expected = 0.5 * t + 10.0 * (2.0 * PI * t / 52.0).sin();
            assert!((v - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn trend_slope_recovered() {
        let mut spec = base("trend");
        spec.trend_slope = 0.5;
        spec.noise = NoiseMode::Iid { sigma: 1.0 };
        spec.length = 200;
        let hits = (0..200)
            .filter(|&seed| {
                let s = generate(&spec, seed).unwrap();
                (0.45..=0.55).contains(&ols_slope(s.values()))
            })
            .count();
        assert!(hits >= 190, "{hits}");
    }

    #[test]
    fn seasonal_acf_at_period() {
        let mut spec = base("seasonal");
        spec.seasonal_amplitude = 10.0;
        spec.noise = NoiseMode::Iid { sigma: 1.0 };
        spec.length = 200;
        for seed in 0..20 {
            let s = generate(&spec, seed).unwrap();
            assert!(acf(s.values(), 52) > 0.5);
        }
    }

    #[test]
    fn suite_shape_and_determinism() {
        let a = standard_suite(42, 200).unwrap();
        let b = standard_suite(42, 200).unwrap();
        assert_eq!(a.len(), 11);
        for ((na, sa), (nb, sb)) in a.iter().zip(&b) {
            assert_eq!(na, nb);
            assert_eq!(sa.len(), 200);
            assert_eq!(sa.values(), sb.values());
        }
        let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, STANDARD_IDS);
        let c = standard_suite(43, 200).unwrap();
        assert_ne!(a[0].1.values(), c[0].1.values());
    }

    #[test]
    fn multiplicative_variance_grows() {
        let spec = standard_spec("multiplicative_variance", 200).unwrap();
        let var = |x: &[f64]| {
            // variance around the known trend
            let m = x.iter().sum::<f64>() / x.len() as f64;
            x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
        };
        let hits = (0..100)
            .filter(|&seed| {
                let s = generate(&spec, seed).unwrap();
                let resid: Vec<f64> = s
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v - spec.deterministic(i + 1))
                    .collect();
                var(&resid[150..]) > var(&resid[..50])
            })
            .count();
        assert!(hits >= 90, "{hits}");
    }

    #[test]
    fn ar2_coefficients_are_stationary() {
        let (phi1, phi2): (f64, f64) = (0.6, 0.2);
        // roots of 1 - phi1 z - phi2 z^2
        let disc = phi1 * phi1 + 4.0 * phi2;
        let r1 = (-phi1 + disc.sqrt()) / (2.0 * phi2);
        let r2 = (-phi1 - disc.sqrt()) / (2.0 * phi2);
        assert!(r1.abs() > 1.0 && r2.abs() > 1.0);
    }

    #[test]
    fn random_walk_starts_from_zero() {
        let mut spec = standard_spec("random_walk", 200).unwrap();
        spec.noise = NoiseMode::Iid { sigma: 0.0 };
        spec.stochastic_trend = StochasticTrend::RandomWalk { drift: 0.1 };
        let s = generate(&spec, 5).unwrap();
        assert!((s.values()[0] - 0.1).abs() < 1e-12);
        assert!((s.values()[199] - 20.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = base("bad");
        spec.length = 5;
        assert!(generate(&spec, 0).is_err());
        let mut spec = base("bad");
        spec.seasonal_amplitude = 1.0;
        spec.seasonal_period = 1;
        assert!(generate(&spec, 0).is_err());
        let mut spec = base("bad");
        spec.trend_slope = 1.0;
        spec.stochastic_trend = StochasticTrend::RandomWalk { drift: 0.0 };
        assert!(generate(&spec, 0).is_err());
        let mut spec = base("bad");
        spec.noise = NoiseMode::Iid { sigma: -1.0 };
        assert!(generate(&spec, 0).is_err());
    }
}
