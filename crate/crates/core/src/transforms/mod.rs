//! Invertible transformation pipelines.
//!
//! A [`PipelineSpec`] is an ordered list of steps applied left to right to a
//! training series. Fitting records a [`TransformState`] holding exactly what
//! [`inverse_transform`] needs to map forecasts on the transformed scale back
//! to the original scale, right to left.

mod boxcox;
mod fracdiff;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::TimeSeries;

pub use boxcox::{
    boxcox_lambda, inverse_value as boxcox_inverse_value, positivity_shift, profile_log_likelihood,
    transform_value as boxcox_value, BOXCOX_MIN_LEN, LAMBDA_MAX, LAMBDA_MIN, SHIFT_FLOOR,
};
pub use fracdiff::{estimate_gph_d, frac_diff_weights, gph_raw, D_MAX, D_MIN, GPH_MIN_LEN};

/// Seasonal differencing period used unless a pipeline overrides it.
pub const DEFAULT_SEASONAL_PERIOD: usize = 52;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("non-positive input to {step} at index {index} (value {value})")]
    NonPositiveInput { step: String, index: usize, value: f64 },
    #[error("{step} needs at least {needed} observations, got {got}")]
    SeriesTooShort { step: String, needed: usize, got: usize },
    #[error("numeric overflow in {0}")]
    NumericOverflow(String),
    #[error("periodogram is degenerate (constant series)")]
    DegeneratePeriodogram,
    #[error("constant series: Box-Cox likelihood is flat")]
    ConstantSeries,
    #[error("unknown or illegal pipeline '{0}'")]
    UnknownPipeline(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    None,
    Difference,
    SeasonalDifference { period: usize },
    FractionalDifference,
    Log,
    BoxCox,
}

impl StepKind {
    pub fn name(&self) -> &'static str {
        match self {
            StepKind::None => "none",
            StepKind::Difference => "difference",
            StepKind::SeasonalDifference { .. } => "seasonal_difference",
            StepKind::FractionalDifference => "fractional_difference",
            StepKind::Log => "log",
            StepKind::BoxCox => "boxcox",
        }
    }

    fn warm_up(&self) -> usize {
        match self {
            StepKind::Difference => 1,
            StepKind::SeasonalDifference { period } => *period,
            _ => 0,
        }
    }
}

/// The fourteen legal configurations, in canonical order.
pub const PIPELINE_IDS: [&str; 14] = [
    "none",
    "difference",
    "seasonal_difference",
    "fractional_difference",
    "log",
    "boxcox",
    "log+difference",
    "boxcox+difference",
    "log+seasonal_difference",
    "boxcox+seasonal_difference",
    "log+fractional_difference",
    "boxcox+fractional_difference",
    "log+difference+seasonal_difference",
    "boxcox+difference+seasonal_difference",
];

/// An ordered list of steps; serialized as the `+`-joined step names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PipelineSpec {
    steps: Vec<StepKind>,
}

impl PipelineSpec {
    /// All fourteen legal pipelines with the default seasonal period.
    pub fn all() -> Vec<PipelineSpec> {
        PIPELINE_IDS.iter().map(|id| id.parse().expect("legal id")).collect()
    }

    pub fn none() -> Self {
        Self {
            steps: vec![StepKind::None],
        }
    }

    pub fn steps(&self) -> &[StepKind] {
        &self.steps
    }

    pub fn is_none(&self) -> bool {
        self.steps == [StepKind::None]
    }

    pub fn id(&self) -> String {
        self.to_string()
    }

    /// Replaces the period of every seasonal-difference step.
    pub fn with_seasonal_period(mut self, period: usize) -> Self {
        for step in &mut self.steps {
            if let StepKind::SeasonalDifference { period: p } = step {
                *p = period;
            }
        }
        self
    }

    /// Observations lost to differencing steps.
    pub fn warm_up(&self) -> usize {
        self.steps.iter().map(StepKind::warm_up).sum()
    }
}

impl fmt::Display for PipelineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.steps.iter().map(StepKind::name).collect();
        f.write_str(&names.join("+"))
    }
}

impl FromStr for PipelineSpec {
    type Err = TransformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if !PIPELINE_IDS.contains(&s) {
            return Err(TransformError::UnknownPipeline(s.to_string()));
        }
        let steps = s
            .split('+')
            .map(|name| match name {
                "none" => StepKind::None,
                "difference" => StepKind::Difference,
                "seasonal_difference" => StepKind::SeasonalDifference {
                    period: DEFAULT_SEASONAL_PERIOD,
                },
                "fractional_difference" => StepKind::FractionalDifference,
                "log" => StepKind::Log,
                "boxcox" => StepKind::BoxCox,
                _ => unreachable!("validated against PIPELINE_IDS"),
            })
            .collect();
        Ok(Self { steps })
    }
}

impl Serialize for PipelineSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PipelineSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Fitted state of one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum StepState {
    None,
    Difference { last: f64 },
    SeasonalDifference { period: usize, tail: Vec<f64> },
    FractionalDifference { d: f64, history: Vec<f64> },
    Log,
    BoxCox { lambda: f64, shift: f64 },
}

/// Everything needed to invert forecasts, in application order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformState {
    pub steps: Vec<StepState>,
    pub warm_up: usize,
}

impl TransformState {
    /// Re-applies the fitted forward map, without refitting, to a series that
    /// starts at the same origin as the training data.
    ///
    /// Applied to the training values this reproduces the fitted output; applied
    /// to a longer series it yields the transformed continuation.
    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>, TransformError> {
        let mut current = values.to_vec();
        for step in &self.steps {
            current = match step {
                StepState::None => current,
                StepState::Difference { .. } => difference(&current, 1, "difference")?,
                StepState::SeasonalDifference { period, .. } => {
                    difference(&current, *period, "seasonal_difference")?
                }
                StepState::FractionalDifference { d, .. } => {
                    let w = frac_diff_weights(*d, current.len());
                    fracdiff::apply(&current, &w)
                }
                StepState::Log => log_values(&current)?,
                StepState::BoxCox { lambda, shift } => current
                    .iter()
                    .map(|v| boxcox::transform_value(v + shift, *lambda))
                    .collect(),
            };
            check_finite(&current, step_name(step))?;
        }
        Ok(current)
    }

    /// The same fitted parameters, re-anchored at the end of `prefix` instead of
    /// the end of the training data. `prefix` must cover the warm-up.
    pub fn anchored(&self, prefix: &[f64]) -> Result<TransformState, TransformError> {
        if prefix.len() < self.warm_up {
            return Err(TransformError::SeriesTooShort {
                step: "anchor".into(),
                needed: self.warm_up,
                got: prefix.len(),
            });
        }
        let mut current = prefix.to_vec();
        let mut steps = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let (next, state) = match step {
                StepState::None => (current.clone(), StepState::None),
                StepState::Difference { .. } => {
                    let last = *current.last().expect("warm-up covers every lag");
                    (current.windows(2).map(|w| w[1] - w[0]).collect(), StepState::Difference { last })
                }
                StepState::SeasonalDifference { period, .. } => {
                    let p = *period;
                    let tail = current[current.len() - p..].to_vec();
                    let diffed = (p..current.len()).map(|t| current[t] - current[t - p]).collect();
                    (diffed, StepState::SeasonalDifference { period: p, tail })
                }
                StepState::FractionalDifference { d, .. } => {
                    let out = fracdiff::apply(&current, &frac_diff_weights(*d, current.len()));
                    (out, StepState::FractionalDifference { d: *d, history: current.clone() })
                }
                StepState::Log => (log_values(&current)?, StepState::Log),
                StepState::BoxCox { lambda, shift } => (
                    current.iter().map(|v| boxcox::transform_value(v + shift, *lambda)).collect(),
                    step.clone(),
                ),
            };
            check_finite(&next, step_name(step))?;
            current = next;
            steps.push(state);
        }
        Ok(TransformState {
            steps,
            warm_up: self.warm_up,
        })
    }

    /// Fitted fractional-difference order, if the pipeline has that step.
    pub fn fractional_d(&self) -> Option<f64> {
        self.steps.iter().find_map(|s| match s {
            StepState::FractionalDifference { d, .. } => Some(*d),
            _ => None,
        })
    }

    /// Fitted Box-Cox `(lambda, shift)`, if the pipeline has that step.
    pub fn boxcox_params(&self) -> Option<(f64, f64)> {
        self.steps.iter().find_map(|s| match s {
            StepState::BoxCox { lambda, shift } => Some((*lambda, *shift)),
            _ => None,
        })
    }
}

fn step_name(step: &StepState) -> &'static str {
    match step {
        StepState::None => "none",
        StepState::Difference { .. } => "difference",
        StepState::SeasonalDifference { .. } => "seasonal_difference",
        StepState::FractionalDifference { .. } => "fractional_difference",
        StepState::Log => "log",
        StepState::BoxCox { .. } => "boxcox",
    }
}

fn check_finite(values: &[f64], step: &str) -> Result<(), TransformError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(TransformError::NumericOverflow(step.to_string()))
    }
}

fn difference(values: &[f64], lag: usize, step: &str) -> Result<Vec<f64>, TransformError> {
    if values.len() <= lag {
        return Err(TransformError::SeriesTooShort {
            step: step.to_string(),
            needed: lag + 1,
            got: values.len(),
        });
    }
    Ok((lag..values.len()).map(|t| values[t] - values[t - lag]).collect())
}

fn log_values(values: &[f64]) -> Result<Vec<f64>, TransformError> {
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| **v <= 0.0) {
        return Err(TransformError::NonPositiveInput {
            step: "log".into(),
            index,
            value,
        });
    }
    Ok(values.iter().map(|v| v.ln()).collect())
}

/// Fits and applies `spec` to the training series.
pub fn fit_transform(train: &TimeSeries, spec: &PipelineSpec) -> Result<(TimeSeries, TransformState), TransformError> {
    let needed = spec.warm_up() + 1;
    if train.len() < needed {
        return Err(TransformError::SeriesTooShort {
            step: spec.to_string(),
            needed,
            got: train.len(),
        });
    }
    let mut current = train.values().to_vec();
    let mut states = Vec::with_capacity(spec.steps().len());
    for step in spec.steps() {
        let (next, state) = match *step {
            StepKind::None => (current.clone(), StepState::None),
            StepKind::Difference => {
                let last = *current.last().expect("non-empty");
                (difference(&current, 1, "difference")?, StepState::Difference { last })
            }
            StepKind::SeasonalDifference { period } => {
                let diffed = difference(&current, period, "seasonal_difference")?;
                let tail = current[current.len() - period..].to_vec();
                (diffed, StepState::SeasonalDifference { period, tail })
            }
            StepKind::FractionalDifference => {
                let d = estimate_gph_d(&current)?;
                let w = frac_diff_weights(d, current.len());
                let out = fracdiff::apply(&current, &w);
                (out, StepState::FractionalDifference { d, history: current.clone() })
            }
            StepKind::Log => (log_values(&current)?, StepState::Log),
            StepKind::BoxCox => {
                let (lambda, shift) = boxcox_lambda(&current)?;
                let out = current
                    .iter()
                    .map(|v| boxcox::transform_value(v + shift, lambda))
                    .collect();
                (out, StepState::BoxCox { lambda, shift })
            }
        };
        check_finite(&next, step.name())?;
        current = next;
        states.push(state);
    }
    let transformed = train
        .derive(current)
        .map_err(|_| TransformError::NumericOverflow(spec.to_string()))?;
    Ok((
        transformed,
        TransformState {
            steps: states,
            warm_up: spec.warm_up(),
        },
    ))
}

/// Maps forecasts on the transformed scale back to the original scale.
pub fn inverse_transform(forecasts: &[f64], state: &TransformState) -> Result<Vec<f64>, TransformError> {
    check_finite(forecasts, "forecast")?;
    let mut current = forecasts.to_vec();
    for step in state.steps.iter().rev() {
        current = match step {
            StepState::None => current,
            StepState::Difference { last } => current
                .iter()
                .scan(*last, |level, x| {
                    *level += x;
                    Some(*level)
                })
                .collect(),
            StepState::SeasonalDifference { period, tail } => {
                let mut extended = tail.clone();
                for x in &current {
                    let v = x + extended[extended.len() - period];
                    extended.push(v);
                }
                extended.split_off(*period)
            }
            StepState::FractionalDifference { d, history } => fracdiff::invert(&current, *d, history),
            StepState::Log => current.iter().map(|x| x.exp()).collect(),
            StepState::BoxCox { lambda, shift } => current
                .iter()
                .map(|&x| {
                    boxcox::inverse_value(x, *lambda)
                        .map(|y| y - shift)
                        .ok_or_else(|| TransformError::NumericOverflow("boxcox inverse".into()))
                })
                .collect::<Result<_, _>>()?,
        };
        check_finite(&current, step_name(step))?;
    }
    Ok(current)
}

/// Rebuilds the training values after the warm-up from their transformed
/// counterparts, by inverting them as if they were forecasts.
pub fn reconstruct_train(original: &[f64], transformed: &[f64], state: &TransformState) -> Result<Vec<f64>, TransformError> {
    let w = state.warm_up.min(original.len());
    inverse_transform(transformed, &state.anchored(&original[..w])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthgen;
    use std::f64::consts::E;

    fn series(values: &[f64]) -> TimeSeries {
        TimeSeries::new("t", 52, values.to_vec()).unwrap()
    }

    #[test]
    fn difference_hand_example() {
        let spec: PipelineSpec = "difference".parse().unwrap();
        let (out, state) = fit_transform(&series(&[1.0, 2.0, 3.0, 4.0]), &spec).unwrap();
        assert_eq!(out.values(), &[1.0, 1.0, 1.0]);
        assert_eq!(state.steps, vec![StepState::Difference { last: 4.0 }]);
        assert_eq!(inverse_transform(&[1.0, 1.0], &state).unwrap(), vec![5.0, 6.0]);
    }

    #[test]
    fn log_hand_example() {
        let spec: PipelineSpec = "log".parse().unwrap();
        let (out, _) = fit_transform(&series(&[1.0, E, E * E]), &spec).unwrap();
        for (a, b) in out.values().iter().zip([0.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn none_is_identity() {
        let spec = PipelineSpec::none();
        let x = [3.0, -1.0, 2.0];
        let (out, state) = fit_transform(&series(&x), &spec).unwrap();
        assert_eq!(out.values(), &x);
        assert_eq!(state.steps, vec![StepState::None]);
        assert_eq!(inverse_transform(&[7.0], &state).unwrap(), vec![7.0]);
    }

    #[test]
    fn seasonal_inverse_extends_tail() {
        let spec = "seasonal_difference".parse::<PipelineSpec>().unwrap().with_seasonal_period(2);
        let x = [1.0, 10.0, 2.0, 12.0, 3.0, 14.0];
        let (out, state) = fit_transform(&series(&x), &spec).unwrap();
        assert_eq!(out.values(), &[1.0, 2.0, 1.0, 2.0]);
        // the continuation 4, 16, 5, 18
        assert_eq!(inverse_transform(&[1.0, 2.0, 1.0, 2.0], &state).unwrap(), vec![4.0, 16.0, 5.0, 18.0]);
    }

    #[test]
    fn boxcox_inverse_out_of_domain() {
        let state = TransformState {
            steps: vec![StepState::BoxCox { lambda: 0.5, shift: 0.0 }],
            warm_up: 0,
        };
        assert!(matches!(
            inverse_transform(&[-3.0], &state),
            Err(TransformError::NumericOverflow(_))
        ));
    }

    #[test]
    fn log_rejects_non_positive() {
        let spec: PipelineSpec = "log".parse().unwrap();
        let err = fit_transform(&series(&[1.0, 0.0, 2.0]), &spec).unwrap_err();
        assert!(matches!(err, TransformError::NonPositiveInput { index: 1, .. }));
    }

    #[test]
    fn too_short_for_seasonal() {
        let spec: PipelineSpec = "seasonal_difference".parse().unwrap();
        let x: Vec<f64> = (0..40).map(f64::from).collect();
        assert!(matches!(
            fit_transform(&series(&x), &spec),
            Err(TransformError::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn log_round_trip_exact() {
        let x = [0.001, 0.5, 1.0, 17.0, 1e8];
        let spec: PipelineSpec = "log".parse().unwrap();
        let (out, state) = fit_transform(&series(&x), &spec).unwrap();
        let back = inverse_transform(out.values(), &state).unwrap();
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }
    }

    #[test]
    fn ids_round_trip_and_reject_illegal() {
        for id in PIPELINE_IDS {
            let spec: PipelineSpec = id.parse().unwrap();
            assert_eq!(spec.to_string(), id);
        }
        assert!("difference+log".parse::<PipelineSpec>().is_err());
        assert!("none+log".parse::<PipelineSpec>().is_err());
        assert_eq!(PipelineSpec::all().len(), 14);
        let json = serde_json::to_string(&PipelineSpec::all()[8]).unwrap();
        assert_eq!(json, "\"log+seasonal_difference\"");
    }

    #[test]
    fn warm_up_accumulates() {
        let spec: PipelineSpec = "log+difference+seasonal_difference".parse().unwrap();
        assert_eq!(spec.warm_up(), 53);
        let suite = synthgen::standard_suite(1, 200).unwrap();
        let (_, s) = &suite[4];
        let (out, state) = fit_transform(s, &spec).unwrap();
        assert_eq!(out.len(), 200 - 53);
        assert_eq!(state.warm_up, 53);
    }

    #[test]
    fn apply_reproduces_fit_output() {
        let suite = synthgen::standard_suite(3, 200).unwrap();
        for (_, s) in &suite {
            for spec in PipelineSpec::all() {
                if let Ok((out, state)) = fit_transform(s, &spec) {
                    let again = state.apply(s.values()).unwrap();
                    assert_eq!(again, out.values());
                }
            }
        }
    }
}
