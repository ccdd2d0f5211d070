//! Additive or multiplicative decomposition into a piecewise-linear trend and
//! Fourier seasonality, fitted as a ridge (MAP) regression on `y / max|y|`.
//!
//! Changepoint slopes get a Gaussian prior with standard deviation
//! `changepoint_prior_scale` and Fourier coefficients one with
//! `seasonality_prior_scale`; the ridge weight of each column is
//! `sigma^2 / scale^2` with the noise variance `sigma^2` plugged in from a
//! preliminary fit.

use nalgebra::{DMatrix, DVector};

use super::{require_len, rmse, Family, ModelError, SeasonalityMode};
use crate::linalg::{design, ridge};

/// Fourier order of the seasonal block.
pub const FOURIER_ORDER: usize = 10;
/// Share of the history in which changepoints are placed.
pub const CHANGEPOINT_RANGE: f64 = 0.8;
/// Prior scale of the base intercept and slope.
const BASE_PRIOR_SCALE: f64 = 5.0;
/// Alternating passes for the multiplicative mode.
const ALTERNATIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Config {
    pub changepoint_prior_scale: f64,
    pub seasonality_prior_scale: f64,
    pub mode: SeasonalityMode,
    pub n_changepoints: usize,
    pub period: usize,
}

#[derive(Debug, Clone)]
struct Layout {
    n_train: usize,
    changepoints: Vec<f64>,
    period: usize,
    order: usize,
}

impl Layout {
    fn new(n: usize, cfg: &Config) -> Self {
        let span = (n - 1) as f64;
        let usable = ((CHANGEPOINT_RANGE * span).floor() as usize).saturating_sub(1);
        let k = cfg.n_changepoints.min(usable);
        let changepoints = (1..=k)
            .map(|j| (CHANGEPOINT_RANGE * span * j as f64 / k as f64).round() / span)
            .collect();
        let order = if cfg.period >= 2 { FOURIER_ORDER.min(cfg.period / 2) } else { 0 };
        Layout {
            n_train: n,
            changepoints,
            period: cfg.period,
            order,
        }
    }

    fn time(&self, i: usize) -> f64 {
        i as f64 / (self.n_train - 1) as f64
    }

    fn trend_row(&self, i: usize) -> Vec<f64> {
        let t = self.time(i);
        let mut row = vec![1.0, t];
        row.extend(self.changepoints.iter().map(|c| (t - c).max(0.0)));
        row
    }

    fn season_row(&self, i: usize) -> Vec<f64> {
        let mut row = Vec::with_capacity(2 * self.order);
        for k in 1..=self.order {
            let w = 2.0 * std::f64::consts::PI * k as f64 * i as f64 / self.period as f64;
            row.push(w.sin());
            row.push(w.cos());
        }
        row
    }

    fn trend_width(&self) -> usize {
        2 + self.changepoints.len()
    }

    fn trend_penalty_scales(&self, cfg: &Config) -> Vec<f64> {
        let mut s = vec![BASE_PRIOR_SCALE, BASE_PRIOR_SCALE];
        s.extend(std::iter::repeat_n(cfg.changepoint_prior_scale, self.changepoints.len()));
        s
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Ridge fit with plug-in noise variance; returns coefficients.
fn map_fit(x: &DMatrix<f64>, y: &[f64], scales: &[f64]) -> Vec<f64> {
    let target = DVector::from_column_slice(y);
    let tiny: Vec<f64> = vec![1e-8; scales.len()];
    let mut beta = ridge(x, &target, &tiny);
    for _ in 0..2 {
        let resid = &target - x * &beta;
        let sigma2 = (resid.dot(&resid) / y.len() as f64).max(1e-12);
        let penalty: Vec<f64> = scales.iter().map(|s| sigma2 / (s * s)).collect();
        beta = ridge(x, &target, &penalty);
    }
    beta.iter().copied().collect()
}

#[derive(Debug, Clone)]
pub(crate) struct ProphetFit {
    layout: Layout,
    mode: SeasonalityMode,
    scale: f64,
    trend_coef: Vec<f64>,
    season_coef: Vec<f64>,
    pub rmse: f64,
}

pub(crate) fn fit(y: &[f64], cfg: &Config) -> Result<ProphetFit, ModelError> {
    require_len(Family::ProphetLike, 10, y.len())?;
    if !(cfg.changepoint_prior_scale > 0.0 && cfg.seasonality_prior_scale > 0.0) {
        return Err(ModelError::InvalidSpec("prior scales must be positive".into()));
    }
    let n = y.len();
    let scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let ys: Vec<f64> = y.iter().map(|v| v / scale).collect();
    let layout = Layout::new(n, cfg);
    let trend_rows: Vec<Vec<f64>> = (0..n).map(|i| layout.trend_row(i)).collect();
    let season_rows: Vec<Vec<f64>> = (0..n).map(|i| layout.season_row(i)).collect();
    let trend_scales = layout.trend_penalty_scales(cfg);
    let season_scales = vec![cfg.seasonality_prior_scale; 2 * layout.order];

    // joint additive fit; also the starting point for the multiplicative mode
    let joint_rows: Vec<Vec<f64>> = trend_rows
        .iter()
        .zip(&season_rows)
        .map(|(t, s)| t.iter().chain(s).copied().collect())
        .collect();
    let mut joint_scales = trend_scales.clone();
    joint_scales.extend(&season_scales);
    let beta = map_fit(&design(&joint_rows), &ys, &joint_scales);
    let tw = layout.trend_width();
    let mut trend_coef = beta[..tw].to_vec();
    let mut season_coef = beta[tw..].to_vec();

    if cfg.mode == SeasonalityMode::Multiplicative && layout.order > 0 {
        let season_x = design(&season_rows);
        let trend_x = design(&trend_rows);
        for _ in 0..ALTERNATIONS {
            let trend: Vec<f64> = trend_rows.iter().map(|r| dot(r, &trend_coef)).collect();
            if trend.iter().any(|t| t.abs() < 1e-8) {
                return Err(ModelError::FitFailed("trend crosses zero in multiplicative mode".into()));
            }
            let ratio: Vec<f64> = ys.iter().zip(&trend).map(|(v, t)| v / t - 1.0).collect();
            season_coef = map_fit(&season_x, &ratio, &season_scales);
            let factor: Vec<f64> = season_rows.iter().map(|r| 1.0 + dot(r, &season_coef)).collect();
            if factor.iter().any(|f| f.abs() < 1e-8) {
                return Err(ModelError::FitFailed("seasonal factor vanishes".into()));
            }
            let adjusted: Vec<f64> = ys.iter().zip(&factor).map(|(v, f)| v / f).collect();
            trend_coef = map_fit(&trend_x, &adjusted, &trend_scales);
        }
    }
    let mut model = ProphetFit {
        layout,
        mode: cfg.mode,
        scale,
        trend_coef,
        season_coef,
        rmse: 0.0,
    };
    let residuals: Vec<f64> = (0..n).map(|i| y[i] - model.predict(i)).collect();
    model.rmse = rmse(&residuals);
    Ok(model)
}

impl ProphetFit {
    fn predict(&self, i: usize) -> f64 {
        let trend = dot(&self.layout.trend_row(i), &self.trend_coef);
        let season = dot(&self.layout.season_row(i), &self.season_coef);
        let v = match self.mode {
            SeasonalityMode::Additive => trend + season,
            SeasonalityMode::Multiplicative => trend * (1.0 + season),
        };
        v * self.scale
    }

    pub fn forecast(&self, h: usize) -> Vec<f64> {
        let n = self.layout.n_train;
        (n..n + h).map(|i| self.predict(i)).collect()
    }
}
