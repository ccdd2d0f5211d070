//! Fractional differencing `(1 - B)^d` and the GPH long-memory estimator.

use std::f64::consts::PI;

use super::TransformError;

pub const D_MIN: f64 = 0.01;
pub const D_MAX: f64 = 0.99;
/// Shortest series accepted by [`estimate_gph_d`].
pub const GPH_MIN_LEN: usize = 32;

/// First `n` binomial-expansion weights of `(1 - B)^d`.
///
/// `w_0 = 1`, `w_k = -w_{k-1} * (d - k + 1) / k`. The estimator clips `d` to
/// `[0.01, 0.99]`, but the recurrence is valid for any real `d`.
pub fn frac_diff_weights(d: f64, n: usize) -> Vec<f64> {
    let mut weights = Vec::with_capacity(n);
    if n == 0 {
        return weights;
    }
    weights.push(1.0);
    for k in 1..n {
        let prev = weights[k - 1];
        weights.push(-prev * (d - k as f64 + 1.0) / k as f64);
    }
    weights
}

/// Applies the full expansion: `x_t = sum_{k=0}^{t} w_k y_{t-k}`.
pub(crate) fn apply(values: &[f64], weights: &[f64]) -> Vec<f64> {
    (0..values.len())
        .map(|t| (0..=t).map(|k| weights[k] * values[t - k]).sum())
        .collect()
}

/// Inverts forecasts given the untransformed history:
/// `y_t = x_t - sum_{k>=1} w_k y_{t-k}`.
pub(crate) fn invert(forecasts: &[f64], d: f64, history: &[f64]) -> Vec<f64> {
    let total = history.len() + forecasts.len();
    let weights = frac_diff_weights(d, total);
    let mut y = Vec::with_capacity(total);
    y.extend_from_slice(history);
    for &x in forecasts {
        let t = y.len();
        let tail: f64 = (1..=t).map(|k| weights[k] * y[t - k]).sum();
        y.push(x - tail);
    }
    y.split_off(history.len())
}

/// Geweke/Porter-Hudak log-periodogram estimate of `d`, clipped to `[0.01, 0.99]`.
///
/// Regresses `log I(w_j)` on `log(4 sin^2(w_j / 2))` over the first
/// `m = floor(sqrt(n))` Fourier frequencies and returns minus the slope.
pub fn estimate_gph_d(values: &[f64]) -> Result<f64, TransformError> {
    let raw = gph_raw(values)?;
    Ok(raw.clamp(D_MIN, D_MAX))
}

/// Unclipped GPH estimate.
pub fn gph_raw(values: &[f64]) -> Result<f64, TransformError> {
    let n = values.len();
    if n < GPH_MIN_LEN {
        return Err(TransformError::SeriesTooShort {
            step: "fractional_difference".into(),
            needed: GPH_MIN_LEN,
            got: n,
        });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let scale = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(TransformError::DegeneratePeriodogram);
    }
    let m = (n as f64).sqrt().floor() as usize;
    let mut xs = Vec::with_capacity(m);
    let mut ys = Vec::with_capacity(m);
    for j in 1..=m {
        let freq = 2.0 * PI * j as f64 / n as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (t, v) in values.iter().enumerate() {
            let angle = freq * t as f64;
            re += (v - mean) * angle.cos();
            im -= (v - mean) * angle.sin();
        }
        let power = (re * re + im * im) / (2.0 * PI * n as f64);
        if power <= f64::MIN_POSITIVE * 1e6 {
            return Err(TransformError::DegeneratePeriodogram);
        }
        xs.push((4.0 * (freq / 2.0).sin().powi(2)).ln());
        ys.push(power.ln());
    }
    let xm = xs.iter().sum::<f64>() / m as f64;
    let ym = ys.iter().sum::<f64>() / m as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    Ok(-sxy / sxx)
}
