//! Seasonal-dimension tests: STL seasonal strength and the ACF spike at the period.

use super::{StationarityError, TestOutcome};

/// Seasonal strength above which seasonality is declared present.
pub const STL_STRENGTH_THRESHOLD: f64 = 0.64;
/// LOESS window for the seasonal smoother.
pub const STL_SEASONAL_WINDOW: usize = 7;

fn variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// `max(0, 1 - Var(R) / Var(S + R))` from an STL decomposition.
pub fn seasonal_strength(y: &[f64], period: usize) -> Result<f64, StationarityError> {
    if period < 2 || y.len() < 2 * period {
        return Err(StationarityError::TooShort {
            needed: 2 * period.max(2),
            got: y.len(),
        });
    }
    let fit = stlrs::params()
        .seasonal_length(STL_SEASONAL_WINDOW)
        .fit(y, period)
        .map_err(|e| StationarityError::Decomposition(e.to_string()))?;
    let remainder = fit.remainder();
    let detrended: Vec<f64> = fit.seasonal().iter().zip(remainder).map(|(s, r)| s + r).collect();
    let denom = variance(&detrended);
    if !(denom > 0.0) {
        return Ok(0.0);
    }
    Ok((1.0 - variance(remainder) / denom).max(0.0))
}

pub fn stl(y: &[f64], period: usize) -> Result<TestOutcome, StationarityError> {
    let fs = seasonal_strength(y, period)?;
    Ok(TestOutcome {
        statistic: fs,
        p_value: None,
        critical_value: Some(STL_STRENGTH_THRESHOLD),
        stationary: fs <= STL_STRENGTH_THRESHOLD,
    })
}

/// Sample autocorrelation at `lag` (denominator `n`).
pub fn acf_at(y: &[f64], lag: usize) -> f64 {
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    let c0: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if c0 == 0.0 || lag >= n {
        return 0.0;
    }
    let ck: f64 = (lag..n).map(|t| (y[t] - mean) * (y[t - lag] - mean)).sum();
    ck / c0
}

/// Seasonal spike: significant iff `|ACF(period)| > 1.96 / sqrt(n)`.
pub fn acf_periodicity(y: &[f64], period: usize) -> Result<TestOutcome, StationarityError> {
    if period < 2 || y.len() <= period + 1 {
        return Err(StationarityError::TooShort {
            needed: period + 2,
            got: y.len(),
        });
    }
    let bound = 1.96 / (y.len() as f64).sqrt();
    let r = acf_at(y, period);
    Ok(TestOutcome {
        statistic: r,
        p_value: None,
        critical_value: Some(bound),
        stationary: r.abs() <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acf_of_alternating_series() {
        let y: Vec<f64> = (0..10).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }).collect();
        // sum of 9 products of -1 over sum of 10 squares
        assert!((acf_at(&y, 1) + 0.9).abs() < 1e-12);
        assert!((acf_at(&y, 2) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn pure_sinusoid_is_strongly_seasonal() {
        let y: Vec<f64> = (0..208)
            .map(|t| 10.0 * (2.0 * std::f64::consts::PI * t as f64 / 52.0).sin() + 0.01 * (t % 3) as f64)
            .collect();
        let fs = seasonal_strength(&y, 52).unwrap();
        assert!(fs > 0.9, "{fs}");
        assert!(!stl(&y, 52).unwrap().stationary);
    }

    #[test]
    fn stl_needs_two_periods() {
        assert!(seasonal_strength(&[1.0; 60], 52).is_err());
    }
}
