use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statlab::metrics::smape;
use statlab::models::{
    fit, grid, score, tune, tune_over, BoosterParams, Component, Family, GradientBooster, ModelError, ModelParams,
    ModelSpec, Trend,
};
use statlab::series::TimeSeries;

fn noise(seed: u64, n: usize) -> Vec<f64> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut r)).collect()
}

fn ar1(seed: u64, n: usize, phi: f64) -> Vec<f64> {
    let e = noise(seed, n + 100);
    let mut y = vec![0.0; n + 100];
    for t in 1..y.len() {
        y[t] = phi * y[t - 1] + e[t];
    }
    y.split_off(100)
}

fn series(y: Vec<f64>, freq: usize) -> TimeSeries {
    TimeSeries::new("test", freq, y).unwrap()
}

/// Closed-form slope of y_t on (1, y_{t-1}).
fn ols_slope(y: &[f64]) -> f64 {
    let x = &y[..y.len() - 1];
    let z = &y[1..];
    let n = x.len() as f64;
    let (mx, mz) = (x.iter().sum::<f64>() / n, z.iter().sum::<f64>() / n);
    let sxz: f64 = x.iter().zip(z).map(|(a, b)| (a - mx) * (b - mz)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxz / sxx
}

#[test]
fn ar1_coefficient_recovered() {
    let spec = ModelSpec::new(ModelParams::AR {
        lags: 1,
        trend: Trend::C,
        seasonal: false,
    });
    let mut close = 0;
    for seed in 0..200 {
        let y = ar1(seed, 200, 0.6);
        let m = fit(&spec, &series(y.clone(), 1)).unwrap();
        let phi = m.coefficients().unwrap()[1];
        assert!((phi - ols_slope(&y)).abs() < 1e-8);
        close += usize::from((phi - 0.6).abs() <= 0.12);
    }
    assert!(close >= 180, "{close}/200 within 0.12");
}

#[test]
fn holt_winters_continues_trend_and_season() {
    let f = |t: usize| 20.0 + 0.1 * t as f64 + 5.0 * (2.0 * PI * t as f64 / 52.0).sin();
    let y: Vec<f64> = (0..208).map(f).collect();
    let spec = ModelSpec::new(ModelParams::HoltWinters {
        trend: Component::Additive,
        damped: false,
        seasonal: Component::Additive,
        seasonal_periods: 52,
    });
    let m = fit(&spec, &series(y, 52)).unwrap();
    let fc = m.forecast(4).unwrap();
    let actual: Vec<f64> = (208..212).map(f).collect();
    let s = smape(&actual, &fc.values).unwrap();
    assert!(s < 0.05, "sMAPE {s}");
}

#[test]
fn prophet_like_continues_sinusoid() {
    let f = |t: usize| 10.0 * (2.0 * PI * t as f64 / 52.0).sin();
    let y: Vec<f64> = (0..208).map(f).collect();
    let m = fit(&ModelSpec::default_for(Family::ProphetLike), &series(y, 52)).unwrap();
    let fc = m.forecast(12).unwrap();
    let worst = fc
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| (v - f(208 + k)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.5, "max abs error {worst}");
}

#[test]
fn forecasts_share_prefix() {
    let y: Vec<f64> = ar1(7, 160, 0.5)
        .iter()
        .enumerate()
        .map(|(t, v)| 50.0 + 0.05 * t as f64 + (2.0 * PI * t as f64 / 12.0).sin() + v)
        .collect();
    let train = series(y, 12);
    for family in Family::ALL {
        let m = fit(&ModelSpec::default_for(family), &train).unwrap();
        let one = m.forecast(1).unwrap();
        let four = m.forecast(4).unwrap();
        assert_eq!(one.values.len(), 1);
        assert_eq!(four.values.len(), 4);
        assert_eq!(one.values[0], four.values[0], "{family}");
    }
}

#[test]
fn zero_horizon_rejected() {
    let m = fit(&ModelSpec::default_for(Family::AR), &series(ar1(1, 80, 0.3), 1)).unwrap();
    assert_eq!(m.forecast(0).unwrap_err(), ModelError::InvalidHorizon);
}

#[test]
fn random_walk_model_is_flat() {
    let y: Vec<f64> = noise(3, 120)
        .iter()
        .scan(0.0, |s, e| {
            *s += e;
            Some(*s)
        })
        .collect();
    let last = *y.last().unwrap();
    let m = fit(&ModelSpec::new(ModelParams::ARIMA { p: 0, d: 1, q: 0 }), &series(y, 1)).unwrap();
    assert!(m.forecast(8).unwrap().values.iter().all(|v| *v == last));
}

#[test]
fn ets_additive_trend_equals_holt() {
    let y: Vec<f64> = noise(11, 150)
        .iter()
        .enumerate()
        .map(|(t, e)| 30.0 + 0.3 * t as f64 + e)
        .collect();
    let train = series(y, 1);
    let ets = fit(
        &ModelSpec::new(ModelParams::ETS {
            error: Component::Additive,
            trend: Component::Additive,
            seasonal: Component::None,
            seasonal_periods: 4,
        }),
        &train,
    )
    .unwrap();
    let holt = fit(
        &ModelSpec::new(ModelParams::HoltWinters {
            trend: Component::Additive,
            damped: false,
            seasonal: Component::None,
            seasonal_periods: 4,
        }),
        &train,
    )
    .unwrap();
    assert!((ets.in_sample_rmse - holt.in_sample_rmse).abs() < 1e-8);
    for (a, b) in ets.forecast(10).unwrap().values.iter().zip(holt.forecast(10).unwrap().values) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn booster_training_error_never_rises() {
    let y = ar1(5, 300, 0.8);
    let x: Vec<Vec<f64>> = (5..y.len())
        .map(|i| {
            let mut r: Vec<f64> = (1..=5).map(|k| y[i - k]).collect();
            r.push(i as f64);
            r
        })
        .collect();
    let target = &y[5..];
    for params in [BoosterParams::default(), BoosterParams {
        num_leaves: 15,
        learning_rate: 0.05,
        ..BoosterParams::default()
    }] {
        let staged = GradientBooster::train(&x, target, &params).staged_mse(&x, target);
        assert_eq!(staged.len(), params.n_estimators);
        for w in staged.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
        }
    }
}

fn tuning_series() -> TimeSeries {
    let y: Vec<f64> = noise(21, 160)
        .iter()
        .enumerate()
        .map(|(t, e)| 40.0 + 0.1 * t as f64 + 3.0 * (2.0 * PI * t as f64 / 12.0).sin() + e)
        .collect();
    series(y, 12)
}

#[test]
fn tuning_respects_budget() {
    let train = tuning_series();
    for family in Family::ALL {
        let out = tune(family, &train, 50, 9).unwrap();
        assert!(out.evaluated <= 50, "{family}: {}", out.evaluated);
        assert_eq!(out.evaluated, grid(family).len().min(50).min(if family == Family::GradientBoosting { 15 } else { 50 }));
        assert_eq!(out.log.len(), out.evaluated);
        assert_eq!(out.spec.family, family);
    }
}

#[test]
fn single_candidate_grid_returns_it() {
    let spec = ModelSpec::new(ModelParams::ARMA {
        p: 1,
        q: 1,
        trend: Trend::C,
    });
    let out = tune_over(Family::ARMA, vec![spec.clone()], &tuning_series(), 50, 0).unwrap();
    assert_eq!(out.spec, spec);
    assert_eq!(out.evaluated, 1);
}

#[test]
fn tuned_score_beats_default() {
    let train = tuning_series();
    // these grids fit inside the budget, so the default is always evaluated
    for family in [Family::AR, Family::ARIMA, Family::GradientBoosting] {
        let out = tune(family, &train, 50, 4).unwrap();
        let default = score(&ModelSpec::default_for(family), &train).unwrap();
        assert!(out.score <= default, "{family}: {} > {default}", out.score);
        assert_eq!(score(&out.spec, &train).unwrap(), out.score);
    }
}

#[test]
fn tuning_is_deterministic() {
    let train = tuning_series();
    let a = tune(Family::HoltWinters, &train, 10, 17).unwrap();
    let b = tune(Family::HoltWinters, &train, 10, 17).unwrap();
    assert_eq!(a, b);
}

#[test]
fn all_failures_reported() {
    let y: Vec<f64> = (0..60).map(|t| (t as f64 * 0.4).sin()).collect();
    let only_mul = vec![ModelSpec::new(ModelParams::ETS {
        error: Component::Multiplicative,
        trend: Component::None,
        seasonal: Component::None,
        seasonal_periods: 4,
    })];
    let err = tune_over(Family::ETS, only_mul, &series(y, 1), 5, 0).unwrap_err();
    assert_eq!(err, ModelError::TuneFailed {
        family: Family::ETS,
        evaluated: 1
    });
}
