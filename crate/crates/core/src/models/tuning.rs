//! Hyperparameter grids and randomized search.

use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::boosting::{lag_matrix, GradientBooster};
use super::{fit, BoosterParams, Component, Family, ModelError, ModelParams, ModelSpec, SeasonalityMode, Trend};
use crate::rng;
use crate::series::TimeSeries;

/// Candidate cap for the boosted-tree search.
pub const GB_MAX_CANDIDATES: usize = 15;
/// Folds of the boosted-tree cross-validation.
pub const CV_FOLDS: usize = 5;
/// Share of the training series used to fit ProphetLike candidates.
pub const VALIDATION_SPLIT: f64 = 0.8;
const SEASONAL_PERIODS: [usize; 4] = [4, 12, 26, 52];

/// Full search grid of a family in canonical order.
pub fn grid(family: Family) -> Vec<ModelSpec> {
    let mut out = Vec::new();
    match family {
        Family::AR => {
            for lags in 1..=5 {
                for trend in Trend::ALL {
                    for seasonal in [true, false] {
                        out.push(ModelParams::AR { lags, trend, seasonal });
                    }
                }
            }
        }
        Family::ARMA => {
            for p in 0..=3 {
                for q in 0..=3 {
                    for trend in Trend::ALL {
                        out.push(ModelParams::ARMA { p, q, trend });
                    }
                }
            }
        }
        Family::ARIMA => {
            for p in 0..=3 {
                for d in 1..=2 {
                    for q in 0..=3 {
                        out.push(ModelParams::ARIMA { p, d, q });
                    }
                }
            }
        }
        Family::ETS => {
            for error in [Component::Additive, Component::Multiplicative] {
                for trend in Component::ALL {
                    for seasonal in Component::ALL {
                        for seasonal_periods in SEASONAL_PERIODS {
                            out.push(ModelParams::ETS {
                                error,
                                trend,
                                seasonal,
                                seasonal_periods,
                            });
                        }
                    }
                }
            }
        }
        Family::HoltWinters => {
            for trend in Component::ALL {
                for damped in [true, false] {
                    for seasonal in Component::ALL {
                        for seasonal_periods in SEASONAL_PERIODS {
                            out.push(ModelParams::HoltWinters {
                                trend,
                                damped,
                                seasonal,
                                seasonal_periods,
                            });
                        }
                    }
                }
            }
        }
        Family::GradientBoosting => {
            for num_leaves in [15, 31] {
                for learning_rate in [0.05, 0.1] {
                    for n_estimators in [50, 100] {
                        out.push(ModelParams::GradientBoosting(BoosterParams {
                            num_leaves,
                            max_depth: 5,
                            learning_rate,
                            n_estimators,
                            reg_alpha: 0.1,
                            reg_lambda: 0.1,
                        }));
                    }
                }
            }
        }
        Family::ProphetLike => {
            for changepoint_prior_scale in [0.01, 0.1, 0.5] {
                for seasonality_prior_scale in [0.1, 1.0, 10.0] {
                    for seasonality_mode in [SeasonalityMode::Additive, SeasonalityMode::Multiplicative] {
                        for n_changepoints in [20, 30] {
                            out.push(ModelParams::ProphetLike {
                                changepoint_prior_scale,
                                seasonality_prior_scale,
                                seasonality_mode,
                                n_changepoints,
                            });
                        }
                    }
                }
            }
        }
    }
    out.into_iter().map(ModelSpec::new).collect()
}

/// One evaluated candidate, in evaluation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneLogEntry {
    pub candidate: usize,
    pub spec: ModelSpec,
    pub score: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneOutcome {
    pub spec: ModelSpec,
    pub score: f64,
    pub evaluated: usize,
    pub log: Vec<TuneLogEntry>,
}

/// Mean squared one-step error over contiguous validation blocks.
pub fn cv_mse(y: &[f64], params: &BoosterParams) -> Result<f64, ModelError> {
    let (x, target) = lag_matrix(y);
    let n = x.len();
    if n < 2 * CV_FOLDS {
        return Err(ModelError::InsufficientData {
            family: Family::GradientBoosting,
            needed: 2 * CV_FOLDS + super::boosting::LAGS,
            got: y.len(),
        });
    }
    let mut total = 0.0;
    for k in 0..CV_FOLDS {
        let (lo, hi) = (k * n / CV_FOLDS, (k + 1) * n / CV_FOLDS);
        let train_x: Vec<Vec<f64>> = x[..lo].iter().chain(&x[hi..]).cloned().collect();
        let train_y: Vec<f64> = target[..lo].iter().chain(&target[hi..]).copied().collect();
        let model = GradientBooster::train(&train_x, &train_y, params);
        let mse = (lo..hi).map(|i| (model.predict(&x[i]) - target[i]).powi(2)).sum::<f64>() / (hi - lo) as f64;
        total += mse;
    }
    Ok(total / CV_FOLDS as f64)
}

/// RMSE of a forecast of the last fifth from a fit on the first four fifths.
pub fn holdout_rmse(spec: &ModelSpec, train: &TimeSeries) -> Result<f64, ModelError> {
    let y = train.values();
    let cut = (VALIDATION_SPLIT * y.len() as f64).floor() as usize;
    if cut < 2 || cut >= y.len() {
        return Err(ModelError::InsufficientData {
            family: spec.family,
            needed: 3,
            got: y.len(),
        });
    }
    let head = train
        .derive(y[..cut].to_vec())
        .map_err(|e| ModelError::FitFailed(e.to_string()))?;
    let model = fit(spec, &head)?;
    let fc = model.forecast(y.len() - cut)?;
    Ok(super::rmse(
        &fc.values.iter().zip(&y[cut..]).map(|(f, a)| a - f).collect::<Vec<f64>>(),
    ))
}

/// Score used to rank one candidate; lower is better.
pub fn score(spec: &ModelSpec, train: &TimeSeries) -> Result<f64, ModelError> {
    let s = match &spec.params {
        ModelParams::GradientBoosting(p) => cv_mse(train.values(), p)?,
        ModelParams::ProphetLike { .. } => holdout_rmse(spec, train)?,
        _ => fit(spec, train)?.in_sample_rmse,
    };
    if s.is_finite() {
        Ok(s)
    } else {
        Err(ModelError::FitFailed("non-finite score".into()))
    }
}

/// Randomized search without replacement over the family grid.
///
/// With a grid no larger than the budget every combination is tried in grid
/// order; otherwise a seeded shuffle picks `budget` of them. The first
/// candidate with the lowest score wins.
pub fn tune(family: Family, train: &TimeSeries, budget: usize, seed: u64) -> Result<TuneOutcome, ModelError> {
    let budget = if family == Family::GradientBoosting {
        budget.min(GB_MAX_CANDIDATES)
    } else {
        budget
    };
    tune_over(family, grid(family), train, budget, seed)
}

/// Same search over an explicit candidate list.
pub fn tune_over(
    family: Family,
    mut candidates: Vec<ModelSpec>,
    train: &TimeSeries,
    budget: usize,
    seed: u64,
) -> Result<TuneOutcome, ModelError> {
    if budget == 0 {
        return Err(ModelError::InvalidSpec("tuning budget must be at least 1".into()));
    }
    if let Some(bad) = candidates.iter().find(|c| c.family != family) {
        return Err(ModelError::InvalidSpec(format!("{} candidate in a {family} search", bad.family)));
    }
    if candidates.len() > budget {
        let mut r = rng::stream(seed, 0);
        candidates.shuffle(&mut r);
        candidates.truncate(budget);
    }
    let scores: Vec<Result<f64, ModelError>> = candidates.iter().map(|spec| score(spec, train)).collect();
    let mut log = Vec::with_capacity(candidates.len());
    let mut best: Option<(f64, usize)> = None;
    for (i, (spec, result)) in candidates.iter().zip(scores).enumerate() {
        let (score, error) = match result {
            Ok(s) => {
                if best.is_none_or(|(b, _)| s < b) {
                    best = Some((s, i));
                }
                (Some(s), None)
            }
            Err(e) => (None, Some(e.to_string())),
        };
        log.push(TuneLogEntry {
            candidate: i,
            spec: spec.clone(),
            score,
            error,
        });
    }
    let evaluated = candidates.len();
    let (score, idx) = best.ok_or(ModelError::TuneFailed { family, evaluated })?;
    Ok(TuneOutcome {
        spec: candidates[idx].clone(),
        score,
        evaluated,
        log,
    })
}

/// Appends log entries as JSON lines, each tagged with `context`.
pub fn append_log(path: &Path, context: &serde_json::Value, entries: &[TuneLogEntry]) -> std::io::Result<()> {
    let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    let mut buf = String::new();
    for e in entries {
        let line = serde_json::json!({ "context": context, "entry": e });
        buf.push_str(&line.to_string());
        buf.push('\n');
    }
    file.write_all(buf.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        let sizes: Vec<usize> = Family::ALL.iter().map(|&f| grid(f).len()).collect();
        assert_eq!(sizes, vec![40, 64, 32, 72, 72, 8, 36]);
    }

    #[test]
    fn budget_caps_evaluations() {
        let y: Vec<f64> = (0..120).map(|t| 10.0 + (t as f64 * 0.7).sin() + 0.1 * t as f64).collect();
        let train = TimeSeries::new("s", 52, y).unwrap();
        let out = tune(Family::ARMA, &train, 3, 1).unwrap();
        assert_eq!(out.evaluated, 3);
        assert_eq!(out.log.len(), 3);
        let again = tune(Family::ARMA, &train, 3, 1).unwrap();
        assert_eq!(out, again);
    }
}
