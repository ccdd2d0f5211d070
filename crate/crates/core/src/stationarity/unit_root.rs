//! Trend-dimension tests: ADF, Phillips-Perron, KPSS, Zivot-Andrews and the
//! Lo-MacKinlay variance ratio.
//!
//! ADF, PP and KPSS use a constant-only (level) deterministic term, and all
//! kernel and augmentation lags follow `floor(12 * (n / 100)^(1/4))`.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{StationarityError, TestOutcome};

pub(crate) const ALPHA: f64 = 0.05;

/// Schwert's long lag rule.
pub fn lag_rule(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("valid")
}

// MacKinnon (1994) p-value surface for the constant-only tau statistic, N = 1.
const TAU_C_STAR: f64 = -1.61;
const TAU_C_MIN: f64 = -18.83;
const TAU_C_MAX: f64 = 2.74;
const TAU_C_SMALLP: [f64; 3] = [2.1659, 1.4412, 3.8269e-2];
const TAU_C_LARGEP: [f64; 4] = [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2];
// MacKinnon (2010) 5% response surface, constant only, N = 1.
const TAU_C_5PCT: [f64; 4] = [-2.86154, -2.8903, -4.234, -40.040];
/// Zivot-Andrews 5% critical value, break in intercept and trend.
pub const ZA_CRITICAL_5PCT: f64 = -5.08;
// KPSS level-stationarity critical values and their upper-tail probabilities.
const KPSS_LEVEL_CRIT: [f64; 4] = [0.347, 0.463, 0.574, 0.739];
const KPSS_LEVEL_PVALS: [f64; 4] = [0.10, 0.05, 0.025, 0.01];

/// Approximate asymptotic p-value of a constant-only Dickey-Fuller tau.
pub fn mackinnon_p(tau: f64) -> f64 {
    if tau > TAU_C_MAX {
        return 1.0;
    }
    if tau < TAU_C_MIN {
        return 0.0;
    }
    let z = if tau <= TAU_C_STAR {
        TAU_C_SMALLP[0] + TAU_C_SMALLP[1] * tau + TAU_C_SMALLP[2] * tau * tau
    } else {
        let [a, b, c, d] = TAU_C_LARGEP;
        a + b * tau + c * tau * tau + d * tau * tau * tau
    };
    std_normal().cdf(z)
}

/// Finite-sample 5% critical value for the constant-only tau with `nobs` observations.
pub fn mackinnon_crit_5pct(nobs: usize) -> f64 {
    let inv = 1.0 / nobs as f64;
    let [c0, c1, c2, c3] = TAU_C_5PCT;
    c0 + c1 * inv + c2 * inv * inv + c3 * inv * inv * inv
}

/// Least squares through the normal equations; returns `(beta, se, rss)`.
///
/// Used for the many small regressions inside the tests. `None` when the
/// design is singular.
pub(crate) fn small_ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Option<(DVector<f64>, DVector<f64>, f64)> {
    let (n, p) = x.shape();
    if n <= p {
        return None;
    }
    let xt = x.transpose();
    let gram = &xt * x;
    // Scale-aware singularity check before inverting.
    let diag_max = gram.diagonal().iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let chol = gram.clone().cholesky()?;
    let inv = chol.inverse();
    let beta = &inv * (&xt * y);
    let resid = y - x * &beta;
    let rss = resid.dot(&resid);
    let sigma2 = rss / (n - p) as f64;
    let se = DVector::from_fn(p, |i, _| (sigma2 * inv[(i, i)]).max(0.0).sqrt());
    let l_diag_min = chol.l().diagonal().iter().fold(f64::INFINITY, |a, b| a.min(b.abs()));
    if l_diag_min * l_diag_min < diag_max * 1e-12 {
        return None;
    }
    Some((beta, se, rss))
}

/// Newey-West long-run variance with a Bartlett kernel (no demeaning).
pub(crate) fn long_run_variance(u: &[f64], lags: usize) -> f64 {
    let n = u.len() as f64;
    let gamma = |j: usize| u[j..].iter().zip(u).map(|(a, b)| a * b).sum::<f64>() / n;
    let mut lrv = gamma(0);
    for j in 1..=lags.min(u.len().saturating_sub(1)) {
        lrv += 2.0 * (1.0 - j as f64 / (lags as f64 + 1.0)) * gamma(j);
    }
    lrv
}

fn differences(y: &[f64]) -> Vec<f64> {
    y.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Augmented Dickey-Fuller with constant and `lags` augmentation terms.
/// Returns `(tau, nobs)`.
pub fn adf_statistic(y: &[f64], lags: usize) -> Result<(f64, usize), StationarityError> {
    let dy = differences(y);
    // dy[t-1] = y[t] - y[t-1]; regression rows for t = lags+1 ..= n-1
    let n = y.len();
    if n < lags + 4 {
        return Err(StationarityError::TooShort { needed: lags + 4, got: n });
    }
    let rows: Vec<usize> = (lags + 1..n).collect();
    let p = 2 + lags;
    let x = DMatrix::from_fn(rows.len(), p, |i, j| {
        let t = rows[i];
        match j {
            0 => 1.0,
            1 => y[t - 1],
            k => dy[t - 1 - (k - 1)],
        }
    });
    let target = DVector::from_fn(rows.len(), |i, _| dy[rows[i] - 1]);
    let (beta, se, _) = small_ols(&x, &target).ok_or(StationarityError::Singular("ADF"))?;
    Ok((beta[1] / se[1], rows.len()))
}

pub fn adf(y: &[f64]) -> Result<TestOutcome, StationarityError> {
    let lags = lag_rule(y.len());
    let (tau, nobs) = adf_statistic(y, lags)?;
    let crit = mackinnon_crit_5pct(nobs);
    Ok(TestOutcome {
        statistic: tau,
        p_value: Some(mackinnon_p(tau)),
        critical_value: Some(crit),
        stationary: tau < crit,
    })
}

/// Phillips-Perron Z(tau) with constant.
pub fn phillips_perron(y: &[f64]) -> Result<TestOutcome, StationarityError> {
    let n = y.len();
    let lags = lag_rule(n);
    let rows = n - 1;
    let x = DMatrix::from_fn(rows, 2, |i, j| if j == 0 { y[i] } else { 1.0 });
    let target = DVector::from_fn(rows, |i, _| y[i + 1]);
    let (beta, se, rss) = small_ols(&x, &target).ok_or(StationarityError::Singular("PP"))?;
    let resid: Vec<f64> = (0..rows).map(|i| target[i] - beta[0] * y[i] - beta[1]).collect();
    let nf = rows as f64;
    let k = 2.0;
    let lam2 = long_run_variance(&resid, lags);
    let s2 = rss / (nf - k);
    let gamma0 = s2 * (nf - k) / nf;
    let sigma = se[0];
    let tau = (beta[0] - 1.0) / sigma;
    let z_tau = (gamma0 / lam2).sqrt() * tau - 0.5 * ((lam2 - gamma0) / lam2.sqrt()) * (nf * sigma / s2.sqrt());
    if !z_tau.is_finite() {
        return Err(StationarityError::Singular("PP"));
    }
    let crit = mackinnon_crit_5pct(rows);
    Ok(TestOutcome {
        statistic: z_tau,
        p_value: Some(mackinnon_p(z_tau)),
        critical_value: Some(crit),
        stationary: z_tau < crit,
    })
}

/// Table-interpolated KPSS p-value, clipped to `[0.01, 0.10]`.
pub fn kpss_p_value(stat: f64) -> f64 {
    if stat <= KPSS_LEVEL_CRIT[0] {
        return KPSS_LEVEL_PVALS[0];
    }
    if stat >= KPSS_LEVEL_CRIT[3] {
        return KPSS_LEVEL_PVALS[3];
    }
    for i in 0..3 {
        let (c0, c1) = (KPSS_LEVEL_CRIT[i], KPSS_LEVEL_CRIT[i + 1]);
        if stat <= c1 {
            let w = (stat - c0) / (c1 - c0);
            return KPSS_LEVEL_PVALS[i] + w * (KPSS_LEVEL_PVALS[i + 1] - KPSS_LEVEL_PVALS[i]);
        }
    }
    KPSS_LEVEL_PVALS[3]
}

/// KPSS test of level stationarity (null: stationary).
pub fn kpss(y: &[f64]) -> Result<TestOutcome, StationarityError> {
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    let resid: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let lrv = long_run_variance(&resid, lag_rule(n));
    if !(lrv > 0.0) {
        return Err(StationarityError::Singular("KPSS"));
    }
    let mut partial = 0.0;
    let mut eta = 0.0;
    for r in &resid {
        partial += r;
        eta += partial * partial;
    }
    let stat = eta / (n as f64 * n as f64 * lrv);
    Ok(TestOutcome {
        statistic: stat,
        p_value: Some(kpss_p_value(stat)),
        critical_value: Some(KPSS_LEVEL_CRIT[1]),
        stationary: stat <= KPSS_LEVEL_CRIT[1],
    })
}

/// Zivot-Andrews minimum t-statistic, break in intercept and trend searched
/// over the middle 70% of the sample.
pub fn zivot_andrews(y: &[f64]) -> Result<TestOutcome, StationarityError> {
    let n = y.len();
    let lags = lag_rule(n);
    let dy = differences(y);
    let first_row = lags + 1;
    let rows: Vec<usize> = (first_row..n).collect();
    let lo = (0.15 * n as f64).ceil() as usize;
    let hi = (0.85 * n as f64).floor() as usize;
    let p = 5 + lags;
    let target = DVector::from_fn(rows.len(), |i, _| dy[rows[i] - 1]);
    let mut best = f64::INFINITY;
    for brk in lo.max(first_row)..hi {
        let x = DMatrix::from_fn(rows.len(), p, |i, j| {
            let t = rows[i];
            let after = t > brk;
            match j {
                0 => 1.0,
                1 => t as f64 / n as f64,
                2 => f64::from(u8::from(after)),
                3 => {
                    if after {
                        (t - brk) as f64 / n as f64
                    } else {
                        0.0
                    }
                }
                4 => y[t - 1],
                k => dy[t - 1 - (k - 4)],
            }
        });
        if let Some((beta, se, _)) = small_ols(&x, &target) {
            let t = beta[4] / se[4];
            if t.is_finite() && t < best {
                best = t;
            }
        }
    }
    if !best.is_finite() {
        return Err(StationarityError::Singular("ZA"));
    }
    Ok(TestOutcome {
        statistic: best,
        p_value: None,
        critical_value: Some(ZA_CRITICAL_5PCT),
        stationary: best < ZA_CRITICAL_5PCT,
    })
}

/// Lo-MacKinlay heteroskedasticity-robust variance ratio at aggregation `q`.
/// Returns `(vr, z)`.
pub fn variance_ratio_statistic(y: &[f64], q: usize) -> Result<(f64, f64), StationarityError> {
    let x = differences(y);
    let t_len = x.len();
    if t_len < 2 * q + 2 {
        return Err(StationarityError::TooShort {
            needed: 2 * q + 3,
            got: y.len(),
        });
    }
    let tf = t_len as f64;
    let qf = q as f64;
    let mu = x.iter().sum::<f64>() / tf;
    let dev: Vec<f64> = x.iter().map(|v| v - mu).collect();
    let ss: f64 = dev.iter().map(|d| d * d).sum();
    if ss == 0.0 {
        return Err(StationarityError::Constant);
    }
    let var_a = ss / (tf - 1.0);
    // q-period sums of increments
    let m = qf * (tf - qf + 1.0) * (1.0 - qf / tf);
    let var_c: f64 = (q..=t_len)
        .map(|end| {
            let s: f64 = x[end - q..end].iter().sum();
            (s - qf * mu).powi(2)
        })
        .sum::<f64>()
        / m;
    let vr = var_c / var_a;
    let mut theta = 0.0;
    for j in 1..q {
        let delta: f64 = (j..t_len).map(|t| dev[t] * dev[t] * dev[t - j] * dev[t - j]).sum::<f64>() * tf / (ss * ss);
        let w = 2.0 * (qf - j as f64) / qf;
        theta += w * w * delta;
    }
    let z = tf.sqrt() * (vr - 1.0) / theta.sqrt();
    if !z.is_finite() {
        return Err(StationarityError::Singular("VR"));
    }
    Ok((vr, z))
}

/// Random-walk null; rejection with a ratio below one indicates mean reversion.
pub fn variance_ratio(y: &[f64]) -> Result<TestOutcome, StationarityError> {
    let (vr, z) = variance_ratio_statistic(y, 4)?;
    let p = (2.0 * std_normal().sf(z.abs())).min(1.0);
    Ok(TestOutcome {
        statistic: z,
        p_value: Some(p),
        critical_value: None,
        stationary: p < ALPHA && vr < 1.0,
    })
}
