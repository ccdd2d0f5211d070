//! Forecast accuracy metrics, computed on the original scale.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("length mismatch: {actual} actual vs {predicted} predicted")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("empty input")]
    Empty,
    #[error("training series needs at least 2 values")]
    ShortTrain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub smape: f64,
    pub rmse: f64,
    pub mae: f64,
    /// `None` when the in-sample naive MAE is zero.
    pub mase: Option<f64>,
}

fn check(actual: &[f64], predicted: &[f64]) -> Result<(), MetricError> {
    if actual.len() != predicted.len() {
        return Err(MetricError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(MetricError::Empty);
    }
    Ok(())
}

/// Symmetric MAPE in `[0, 2]`. Terms with `|y| + |yhat| = 0` contribute zero.
pub fn smape(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricError> {
    check(actual, predicted)?;
    let total: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, f)| {
            let denom = (y.abs() + f.abs()) / 2.0;
            if denom == 0.0 {
                0.0
            } else {
                (y - f).abs() / denom
            }
        })
        .sum();
    Ok(total / actual.len() as f64)
}

pub fn rmse_mae(actual: &[f64], predicted: &[f64]) -> Result<(f64, f64), MetricError> {
    check(actual, predicted)?;
    let n = actual.len() as f64;
    let (sq, abs) = actual
        .iter()
        .zip(predicted)
        .fold((0.0, 0.0), |(sq, abs), (y, f)| (sq + (y - f).powi(2), abs + (y - f).abs()));
    Ok(((sq / n).sqrt(), abs / n))
}

/// MAE scaled by the in-sample one-step naive MAE of `train`.
pub fn mase(actual: &[f64], predicted: &[f64], train: &[f64]) -> Result<Option<f64>, MetricError> {
    check(actual, predicted)?;
    if train.len() < 2 {
        return Err(MetricError::ShortTrain);
    }
    let naive = train.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (train.len() - 1) as f64;
    if naive == 0.0 {
        return Ok(None);
    }
    let (_, mae) = rmse_mae(actual, predicted)?;
    Ok(Some(mae / naive))
}

pub fn evaluate(actual: &[f64], predicted: &[f64], train: &[f64]) -> Result<MetricSet, MetricError> {
    let (rmse, mae) = rmse_mae(actual, predicted)?;
    Ok(MetricSet {
        smape: smape(actual, predicted)?,
        rmse,
        mae,
        mase: mase(actual, predicted, train)?,
    })
}
