//! Forecaster families, their hyperparameter grids and randomized tuning.
//!
//! Every model is fitted on an already-transformed training series and
//! forecasts on that same scale.

mod arima;
mod boosting;
pub mod optim;
mod prophet;
mod smoothing;
pub mod tuning;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::TimeSeries;

pub use boosting::{BoosterParams, GradientBooster};
pub use tuning::{append_log, grid, score, tune, tune_over, TuneLogEntry, TuneOutcome, GB_MAX_CANDIDATES};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("{family} needs at least {needed} observations, got {got}")]
    InsufficientData { family: Family, needed: usize, got: usize },
    #[error("{family} with multiplicative components needs strictly positive data")]
    NonPositiveData { family: Family },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("fit failed: {0}")]
    FitFailed(String),
    #[error("forecast is not finite")]
    NonFiniteForecast,
    #[error("horizon must be at least 1")]
    InvalidHorizon,
    #[error("every {family} candidate failed ({evaluated} tried)")]
    TuneFailed { family: Family, evaluated: usize },
    #[error("unknown model family '{0}'")]
    UnknownFamily(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    AR,
    ARMA,
    ARIMA,
    ETS,
    HoltWinters,
    GradientBoosting,
    ProphetLike,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::AR,
        Family::ARMA,
        Family::ARIMA,
        Family::ETS,
        Family::HoltWinters,
        Family::GradientBoosting,
        Family::ProphetLike,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Family::AR => "AR",
            Family::ARMA => "ARMA",
            Family::ARIMA => "ARIMA",
            Family::ETS => "ETS",
            Family::HoltWinters => "HoltWinters",
            Family::GradientBoosting => "GradientBoosting",
            Family::ProphetLike => "ProphetLike",
        }
    }

    pub fn category(self) -> Category {
        match self {
            Family::AR | Family::ARMA => Category::TraditionallyRequired,
            Family::ARIMA => Category::Partial,
            _ => Category::NotRequired,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| ModelError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    TraditionallyRequired,
    Partial,
    NotRequired,
}

impl Category {
    pub fn id(self) -> &'static str {
        match self {
            Category::TraditionallyRequired => "traditionally_required",
            Category::Partial => "partial",
            Category::NotRequired => "not_required",
        }
    }
}

/// Deterministic terms of the autoregressive families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    /// No deterministic term.
    N,
    /// Constant.
    C,
    /// Linear time trend without constant.
    T,
    /// Constant plus linear trend.
    Ct,
}

impl Trend {
    pub const ALL: [Trend; 4] = [Trend::N, Trend::C, Trend::T, Trend::Ct];

    pub fn has_const(self) -> bool {
        matches!(self, Trend::C | Trend::Ct)
    }

    pub fn has_linear(self) -> bool {
        matches!(self, Trend::T | Trend::Ct)
    }

    /// Regressor values at 1-based time `t`.
    pub(crate) fn terms(self, t: usize) -> Vec<f64> {
        let mut v = Vec::with_capacity(2);
        if self.has_const() {
            v.push(1.0);
        }
        if self.has_linear() {
            v.push(t as f64);
        }
        v
    }

    pub(crate) fn width(self) -> usize {
        usize::from(self.has_const()) + usize::from(self.has_linear())
    }
}

/// Trend or seasonal component of the exponential-smoothing families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    None,
    #[serde(rename = "add")]
    Additive,
    #[serde(rename = "mul")]
    Multiplicative,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::None, Component::Additive, Component::Multiplicative];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeasonalityMode {
    #[serde(rename = "additive")]
    Additive,
    #[serde(rename = "multiplicative")]
    Multiplicative,
}

/// Family-specific hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelParams {
    AR {
        lags: usize,
        trend: Trend,
        seasonal: bool,
    },
    ARMA {
        p: usize,
        q: usize,
        trend: Trend,
    },
    ARIMA {
        p: usize,
        d: usize,
        q: usize,
    },
    ETS {
        error: Component,
        trend: Component,
        seasonal: Component,
        seasonal_periods: usize,
    },
    HoltWinters {
        trend: Component,
        damped: bool,
        seasonal: Component,
        seasonal_periods: usize,
    },
    GradientBoosting(BoosterParams),
    ProphetLike {
        changepoint_prior_scale: f64,
        seasonality_prior_scale: f64,
        seasonality_mode: SeasonalityMode,
        n_changepoints: usize,
    },
}

impl ModelParams {
    pub fn family(&self) -> Family {
        match self {
            ModelParams::AR { .. } => Family::AR,
            ModelParams::ARMA { .. } => Family::ARMA,
            ModelParams::ARIMA { .. } => Family::ARIMA,
            ModelParams::ETS { .. } => Family::ETS,
            ModelParams::HoltWinters { .. } => Family::HoltWinters,
            ModelParams::GradientBoosting(_) => Family::GradientBoosting,
            ModelParams::ProphetLike { .. } => Family::ProphetLike,
        }
    }
}

/// A family plus concrete hyperparameters. Serialized as
/// `{family, params, category}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct ModelSpec {
    pub family: Family,
    pub params: ModelParams,
    pub category: Category,
}

#[derive(Deserialize)]
struct RawSpec {
    family: Family,
    params: serde_json::Value,
}

impl TryFrom<RawSpec> for ModelSpec {
    type Error = String;

    fn try_from(raw: RawSpec) -> Result<Self, Self::Error> {
        let params = parse_params(raw.family, raw.params).map_err(|e| e.to_string())?;
        Ok(ModelSpec::new(params))
    }
}

fn parse_params(family: Family, value: serde_json::Value) -> Result<ModelParams, serde_json::Error> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Ar {
        lags: usize,
        trend: Trend,
        seasonal: bool,
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Arma {
        p: usize,
        q: usize,
        trend: Trend,
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Arima {
        p: usize,
        d: usize,
        q: usize,
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Ets {
        error: Component,
        trend: Component,
        seasonal: Component,
        seasonal_periods: usize,
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Hw {
        trend: Component,
        damped: bool,
        seasonal: Component,
        seasonal_periods: usize,
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Prophet {
        changepoint_prior_scale: f64,
        seasonality_prior_scale: f64,
        seasonality_mode: SeasonalityMode,
        n_changepoints: usize,
    }
    Ok(match family {
        Family::AR => {
            let a: Ar = serde_json::from_value(value)?;
            ModelParams::AR {
                lags: a.lags,
                trend: a.trend,
                seasonal: a.seasonal,
            }
        }
        Family::ARMA => {
            let a: Arma = serde_json::from_value(value)?;
            ModelParams::ARMA {
                p: a.p,
                q: a.q,
                trend: a.trend,
            }
        }
        Family::ARIMA => {
            let a: Arima = serde_json::from_value(value)?;
            ModelParams::ARIMA { p: a.p, d: a.d, q: a.q }
        }
        Family::ETS => {
            let e: Ets = serde_json::from_value(value)?;
            ModelParams::ETS {
                error: e.error,
                trend: e.trend,
                seasonal: e.seasonal,
                seasonal_periods: e.seasonal_periods,
            }
        }
        Family::HoltWinters => {
            let h: Hw = serde_json::from_value(value)?;
            ModelParams::HoltWinters {
                trend: h.trend,
                damped: h.damped,
                seasonal: h.seasonal,
                seasonal_periods: h.seasonal_periods,
            }
        }
        Family::GradientBoosting => ModelParams::GradientBoosting(serde_json::from_value(value)?),
        Family::ProphetLike => {
            let p: Prophet = serde_json::from_value(value)?;
            ModelParams::ProphetLike {
                changepoint_prior_scale: p.changepoint_prior_scale,
                seasonality_prior_scale: p.seasonality_prior_scale,
                seasonality_mode: p.seasonality_mode,
                n_changepoints: p.n_changepoints,
            }
        }
    })
}

impl ModelSpec {
    pub fn new(params: ModelParams) -> Self {
        let family = params.family();
        ModelSpec {
            family,
            params,
            category: family.category(),
        }
    }

    /// A fixed, always-valid configuration for each family.
    pub fn default_for(family: Family) -> Self {
        ModelSpec::new(match family {
            Family::AR => ModelParams::AR {
                lags: 1,
                trend: Trend::C,
                seasonal: false,
            },
            Family::ARMA => ModelParams::ARMA {
                p: 1,
                q: 0,
                trend: Trend::C,
            },
            Family::ARIMA => ModelParams::ARIMA { p: 1, d: 1, q: 0 },
            Family::ETS => ModelParams::ETS {
                error: Component::Additive,
                trend: Component::Additive,
                seasonal: Component::None,
                seasonal_periods: 4,
            },
            Family::HoltWinters => ModelParams::HoltWinters {
                trend: Component::Additive,
                damped: false,
                seasonal: Component::None,
                seasonal_periods: 4,
            },
            Family::GradientBoosting => ModelParams::GradientBoosting(BoosterParams::default()),
            Family::ProphetLike => ModelParams::ProphetLike {
                changepoint_prior_scale: 0.1,
                seasonality_prior_scale: 1.0,
                seasonality_mode: SeasonalityMode::Additive,
                n_changepoints: 20,
            },
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = serde_json::to_string(&self.params).map_err(|_| fmt::Error)?;
        write!(f, "{} {}", self.family, params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    pub values: Vec<f64>,
    pub horizon: usize,
}

#[derive(Debug, Clone)]
enum Fitted {
    Ar(arima::ArFit),
    Arma(arima::ArmaFit),
    Arima(arima::ArimaFit),
    Smoothing(smoothing::SmoothingFit),
    Boosting(boosting::BoostingFit),
    Prophet(prophet::ProphetFit),
}

/// A fitted model that can forecast any horizon without refitting.
#[derive(Debug, Clone)]
pub struct FittedModel {
    pub spec: ModelSpec,
    pub in_sample_rmse: f64,
    inner: Fitted,
}

impl FittedModel {
    pub fn forecast(&self, h: usize) -> Result<Forecast, ModelError> {
        forecast(self, h)
    }

    /// AR regression coefficients (deterministic terms, then lags) or the
    /// smoothing weights `[alpha, beta, gamma, phi]`; `None` for other families.
    pub fn coefficients(&self) -> Option<Vec<f64>> {
        match &self.inner {
            Fitted::Ar(f) => Some(f.coefficients().to_vec()),
            Fitted::Smoothing(f) => {
                let s = f.params();
                Some(vec![s.alpha, s.beta, s.gamma, s.phi])
            }
            _ => None,
        }
    }
}

pub(crate) fn rmse(residuals: &[f64]) -> f64 {
    if residuals.is_empty() {
        return f64::NAN;
    }
    (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt()
}

pub(crate) fn require_len(family: Family, needed: usize, got: usize) -> Result<(), ModelError> {
    if got < needed {
        Err(ModelError::InsufficientData { family, needed, got })
    } else {
        Ok(())
    }
}

/// Fits `spec` to the training series.
pub fn fit(spec: &ModelSpec, train: &TimeSeries) -> Result<FittedModel, ModelError> {
    let y = train.values();
    let period = train.frequency();
    let (inner, in_sample_rmse) = match spec.params {
        ModelParams::AR { lags, trend, seasonal } => {
            let f = arima::fit_ar(y, lags, trend, if seasonal { Some(period) } else { None })?;
            let r = f.rmse;
            (Fitted::Ar(f), r)
        }
        ModelParams::ARMA { p, q, trend } => {
            let f = arima::fit_arma(y, p, q, trend)?;
            let r = f.rmse;
            (Fitted::Arma(f), r)
        }
        ModelParams::ARIMA { p, d, q } => {
            let f = arima::fit_arima(y, p, d, q)?;
            let r = f.rmse();
            (Fitted::Arima(f), r)
        }
        ModelParams::ETS {
            error,
            trend,
            seasonal,
            seasonal_periods,
        } => {
            let cfg = smoothing::Config {
                family: Family::ETS,
                error,
                trend,
                damped: false,
                seasonal,
                period: seasonal_periods,
            };
            let f = smoothing::fit(y, &cfg)?;
            let r = f.rmse;
            (Fitted::Smoothing(f), r)
        }
        ModelParams::HoltWinters {
            trend,
            damped,
            seasonal,
            seasonal_periods,
        } => {
            let cfg = smoothing::Config {
                family: Family::HoltWinters,
                error: Component::Additive,
                trend,
                damped,
                seasonal,
                period: seasonal_periods,
            };
            let f = smoothing::fit(y, &cfg)?;
            let r = f.rmse;
            (Fitted::Smoothing(f), r)
        }
        ModelParams::GradientBoosting(params) => {
            let f = boosting::fit(y, &params)?;
            let r = f.rmse;
            (Fitted::Boosting(f), r)
        }
        ModelParams::ProphetLike {
            changepoint_prior_scale,
            seasonality_prior_scale,
            seasonality_mode,
            n_changepoints,
        } => {
            let cfg = prophet::Config {
                changepoint_prior_scale,
                seasonality_prior_scale,
                mode: seasonality_mode,
                n_changepoints,
                period,
            };
            let f = prophet::fit(y, &cfg)?;
            let r = f.rmse;
            (Fitted::Prophet(f), r)
        }
    };
    if !in_sample_rmse.is_finite() {
        return Err(ModelError::FitFailed("non-finite in-sample error".into()));
    }
    Ok(FittedModel {
        spec: spec.clone(),
        in_sample_rmse,
        inner,
    })
}

/// `h`-step forecast on the training scale.
pub fn forecast(model: &FittedModel, h: usize) -> Result<Forecast, ModelError> {
    if h == 0 {
        return Err(ModelError::InvalidHorizon);
    }
    let values = match &model.inner {
        Fitted::Ar(f) => f.forecast(h),
        Fitted::Arma(f) => f.forecast(h),
        Fitted::Arima(f) => f.forecast(h),
        Fitted::Smoothing(f) => f.forecast(h),
        Fitted::Boosting(f) => f.forecast(h),
        Fitted::Prophet(f) => f.forecast(h),
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ModelError::NonFiniteForecast);
    }
    Ok(Forecast { values, horizon: h })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn categories() {
        assert_eq!(Family::AR.category(), Category::TraditionallyRequired);
        assert_eq!(Family::ARMA.category(), Category::TraditionallyRequired);
        assert_eq!(Family::ARIMA.category(), Category::Partial);
        for f in [Family::ETS, Family::HoltWinters, Family::GradientBoosting, Family::ProphetLike] {
            assert_eq!(f.category(), Category::NotRequired);
        }
    }

    #[test]
    fn spec_json_round_trip() {
        for family in Family::ALL {
            let spec = ModelSpec::default_for(family);
            let json = spec.to_json();
            let v: serde_json::Value = serde_json::from_str(&json).unwrap();
            assert_eq!(v["family"], family.id());
            assert!(v["params"].is_object());
            assert_eq!(v["category"], family.category().id());
            let back: ModelSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back, spec);
        }
    }

    #[test]
    fn params_checked_against_family() {
        let bad = r#"{"family":"ARIMA","params":{"p":1,"q":0,"trend":"c"}}"#;
        assert!(serde_json::from_str::<ModelSpec>(bad).is_err());
        assert_eq!("holtwinters".parse::<Family>().unwrap(), Family::HoltWinters);
        assert!("lstm".parse::<Family>().is_err());
    }
}
