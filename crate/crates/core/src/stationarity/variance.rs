//! Variance-dimension tests on OLS-detrended residuals.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor};

use super::unit_root::{small_ols, ALPHA};
use super::{StationarityError, TestOutcome};

/// Lags in the ARCH LM auxiliary regression.
pub const ARCH_LAGS: usize = 4;
/// Fraction of the sample dropped from the middle by Goldfeld-Quandt.
pub const GQ_DROP: f64 = 0.2;

fn trend_design(times: &[f64], quadratic: bool) -> DMatrix<f64> {
    let p = if quadratic { 3 } else { 2 };
    DMatrix::from_fn(times.len(), p, |i, j| times[i].powi(j as i32))
}

/// Residuals of `y` on `[1, t]`, `t = 1..=n`.
pub fn detrend(y: &[f64]) -> Result<Vec<f64>, StationarityError> {
    let times: Vec<f64> = (1..=y.len()).map(|t| t as f64).collect();
    let x = trend_design(&times, false);
    let target = DVector::from_column_slice(y);
    let (beta, _, _) = small_ols(&x, &target).ok_or(StationarityError::Singular("detrend"))?;
    Ok((0..y.len()).map(|i| y[i] - beta[0] - beta[1] * times[i]).collect())
}

fn r_squared(x: &DMatrix<f64>, y: &[f64], name: &'static str) -> Result<f64, StationarityError> {
    let target = DVector::from_column_slice(y);
    let (_, _, rss) = small_ols(x, &target).ok_or(StationarityError::Singular(name))?;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if tss <= 0.0 {
        return Err(StationarityError::Constant);
    }
    Ok(1.0 - rss / tss)
}

fn lm_outcome(stat: f64, df: f64) -> TestOutcome {
    let chi = ChiSquared::new(df).expect("df > 0");
    let p = chi.sf(stat).clamp(0.0, 1.0);
    TestOutcome {
        statistic: stat,
        p_value: Some(p),
        critical_value: Some(chi.inverse_cdf(1.0 - ALPHA)),
        stationary: p >= ALPHA,
    }
}

fn squared_residuals(y: &[f64]) -> Result<(Vec<f64>, Vec<f64>), StationarityError> {
    let e = detrend(y)?;
    let e2: Vec<f64> = e.iter().map(|v| v * v).collect();
    let times: Vec<f64> = (1..=y.len()).map(|t| t as f64).collect();
    Ok((e2, times))
}

/// Breusch-Pagan: squared residuals on `t`, LM = n R^2 against chi-squared(1).
pub fn breusch_pagan(y: &[f64]) -> Result<TestOutcome, StationarityError> {
    let (e2, times) = squared_residuals(y)?;
    let r2 = r_squared(&trend_design(&times, false), &e2, "BP")?;
    Ok(lm_outcome(y.len() as f64 * r2, 1.0))
}

/// White: squared residuals on `t` and `t^2`, against chi-squared(2).
pub fn white(y: &[f64]) -> Result<TestOutcome, StationarityError> {
    let (e2, times) = squared_residuals(y)?;
    // rescale time so the quadratic column stays well conditioned
    let scaled: Vec<f64> = times.iter().map(|t| t / y.len() as f64).collect();
    let r2 = r_squared(&trend_design(&scaled, true), &e2, "White")?;
    Ok(lm_outcome(y.len() as f64 * r2, 2.0))
}

/// Goldfeld-Quandt: separate linear fits on the segments before and after the
/// dropped middle fifth, two-sided F-test on their residual variances.
pub fn goldfeld_quandt(y: &[f64]) -> Result<TestOutcome, StationarityError> {
    let n = y.len();
    let drop = (GQ_DROP * n as f64).round() as usize;
    let m = (n - drop) / 2;
    if m < 5 {
        return Err(StationarityError::TooShort { needed: 13, got: n });
    }
    let rss = |seg: &[f64], offset: usize| -> Result<f64, StationarityError> {
        let times: Vec<f64> = (0..seg.len()).map(|i| (offset + i + 1) as f64).collect();
        let x = trend_design(&times, false);
        let (_, _, rss) =
            small_ols(&x, &DVector::from_column_slice(seg)).ok_or(StationarityError::Singular("GQ"))?;
        Ok(rss)
    };
    let first = rss(&y[..m], 0)?;
    let last = rss(&y[n - m..], n - m)?;
    if first <= 0.0 {
        return Err(StationarityError::Constant);
    }
    let df = (m - 2) as f64;
    let f = last / first;
    let dist = FisherSnedecor::new(df, df).expect("df > 0");
    let p = (2.0 * dist.cdf(f).min(dist.sf(f))).min(1.0);
    Ok(TestOutcome {
        statistic: f,
        p_value: Some(p),
        critical_value: None,
        stationary: p >= ALPHA,
    })
}

/// Engle's ARCH LM test with [`ARCH_LAGS`] lags.
pub fn arch_lm(y: &[f64]) -> Result<TestOutcome, StationarityError> {
    let e = detrend(y)?;
    let e2: Vec<f64> = e.iter().map(|v| v * v).collect();
    let q = ARCH_LAGS;
    if e2.len() < q + 10 {
        return Err(StationarityError::TooShort {
            needed: q + 10,
            got: e2.len(),
        });
    }
    let rows = e2.len() - q;
    let x = DMatrix::from_fn(rows, q + 1, |i, j| if j == 0 { 1.0 } else { e2[q + i - j] });
    let r2 = r_squared(&x, &e2[q..], "ARCH")?;
    Ok(lm_outcome(rows as f64 * r2, q as f64))
}
