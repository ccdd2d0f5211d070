//! AR by least squares, ARMA by conditional sum of squares, ARIMA by
//! differencing around a zero-mean ARMA.

use nalgebra::{DMatrix, DVector};

use super::optim::nelder_mead;
use super::{require_len, rmse, Family, ModelError, Trend};
use crate::linalg::lstsq;

#[derive(Debug, Clone)]
pub(crate) struct ArFit {
    coef: Vec<f64>,
    lags: usize,
    trend: Trend,
    period: Option<usize>,
    history: Vec<f64>,
    pub rmse: f64,
}

/// Deterministic regressors at 0-based index `i`.
fn ar_exog(i: usize, trend: Trend, period: Option<usize>) -> Vec<f64> {
    let mut row = trend.terms(i + 1);
    if let Some(p) = period {
        let season = i % p;
        // drop the first season when a constant is present
        let first = usize::from(trend.has_const());
        for s in first..p {
            row.push(f64::from(u8::from(season == s)));
        }
    }
    row
}

fn ar_row(y: &[f64], i: usize, lags: usize, trend: Trend, period: Option<usize>) -> Vec<f64> {
    let mut row = ar_exog(i, trend, period);
    row.extend((1..=lags).map(|k| y[i - k]));
    row
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn fit_ar(y: &[f64], lags: usize, trend: Trend, period: Option<usize>) -> Result<ArFit, ModelError> {
    if lags == 0 {
        return Err(ModelError::InvalidSpec("AR needs at least one lag".into()));
    }
    let ncols = trend.width() + period.map_or(0, |p| p - usize::from(trend.has_const())) + lags;
    require_len(Family::AR, lags + ncols + 2, y.len())?;
    let rows: Vec<Vec<f64>> = (lags..y.len()).map(|i| ar_row(y, i, lags, trend, period)).collect();
    let x = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
    let target = DVector::from_column_slice(&y[lags..]);
    let coef: Vec<f64> = lstsq(&x, &target).iter().copied().collect();
    let residuals: Vec<f64> = rows.iter().zip(&y[lags..]).map(|(r, v)| v - dot(r, &coef)).collect();
    Ok(ArFit {
        coef,
        lags,
        trend,
        period,
        history: y.to_vec(),
        rmse: rmse(&residuals),
    })
}

impl ArFit {
    pub fn coefficients(&self) -> &[f64] {
        &self.coef
    }

    pub fn forecast(&self, h: usize) -> Vec<f64> {
        let mut ext = self.history.clone();
        let n = ext.len();
        for i in n..n + h {
            let v = dot(&ar_row(&ext, i, self.lags, self.trend, self.period), &self.coef);
            ext.push(v);
        }
        ext[n..].to_vec()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ArmaFit {
    trend: Trend,
    beta: Vec<f64>,
    phi: Vec<f64>,
    theta: Vec<f64>,
    n: usize,
    u: Vec<f64>,
    e: Vec<f64>,
    pub rmse: f64,
}

/// CSS residuals of `u` for the given ARMA coefficients; pre-sample errors are zero.
fn css_residuals(u: &[f64], phi: &[f64], theta: &[f64]) -> Vec<f64> {
    let p = phi.len();
    let mut e = vec![0.0; u.len()];
    for t in p..u.len() {
        let mut v = u[t];
        for (i, ph) in phi.iter().enumerate() {
            v -= ph * u[t - 1 - i];
        }
        for (j, th) in theta.iter().enumerate() {
            if t > j {
                v -= th * e[t - 1 - j];
            }
        }
        e[t] = v;
    }
    e
}

fn sd(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let m = y.iter().sum::<f64>() / n;
    (y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt()
}

pub(crate) fn fit_arma(y: &[f64], p: usize, q: usize, trend: Trend) -> Result<ArmaFit, ModelError> {
    let k = trend.width();
    let n = y.len();
    require_len(Family::ARMA, p + q + k + 10, n)?;
    let exog: Vec<Vec<f64>> = (1..=n).map(|t| trend.terms(t)).collect();

    // starting values: OLS trend, then OLS AR on the detrended series
    let beta0: Vec<f64> = if k > 0 {
        let x = DMatrix::from_fn(n, k, |i, j| exog[i][j]);
        lstsq(&x, &DVector::from_column_slice(y)).iter().copied().collect()
    } else {
        Vec::new()
    };
    let u0: Vec<f64> = (0..n).map(|i| y[i] - dot(&exog[i], &beta0)).collect();
    let phi0: Vec<f64> = if p > 0 {
        let rows = n - p;
        let x = DMatrix::from_fn(rows, p, |i, j| u0[p + i - 1 - j]);
        lstsq(&x, &DVector::from_column_slice(&u0[p..])).iter().copied().collect()
    } else {
        Vec::new()
    };
    let mut start = beta0.clone();
    start.extend(&phi0);
    start.extend(std::iter::repeat_n(0.0, q));

    let scale = sd(y).max(1e-8);
    let mut steps: Vec<f64> = (0..k)
        .map(|j| {
            let mean_abs = exog.iter().map(|r| r[j].abs()).sum::<f64>() / n as f64;
            (0.1 * beta0[j].abs()).max(0.05 * scale / mean_abs.max(1.0))
        })
        .collect();
    steps.extend(std::iter::repeat_n(0.1, p + q));

    let split = |x: &[f64]| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        (x[..k].to_vec(), x[k..k + p].to_vec(), x[k + p..].to_vec())
    };
    let objective = |x: &[f64]| {
        let (b, ph, th) = split(x);
        let u: Vec<f64> = (0..n).map(|i| y[i] - dot(&exog[i], &b)).collect();
        css_residuals(&u, &ph, &th)[p..].iter().map(|e| e * e).sum::<f64>()
    };
    let min = nelder_mead(objective, &start, &steps);
    if !min.converged {
        return Err(ModelError::FitFailed(format!(
            "ARMA({p},{q}) CSS did not converge in {} iterations",
            min.iterations
        )));
    }
    if !min.value.is_finite() {
        return Err(ModelError::FitFailed("ARMA CSS objective is not finite".into()));
    }
    let (beta, phi, theta) = split(&min.x);
    let u: Vec<f64> = (0..n).map(|i| y[i] - dot(&exog[i], &beta)).collect();
    let e = css_residuals(&u, &phi, &theta);
    let rmse = rmse(&e[p..]);
    Ok(ArmaFit {
        trend,
        beta,
        phi,
        theta,
        n,
        u,
        e,
        rmse,
    })
}

impl ArmaFit {
    pub fn forecast(&self, h: usize) -> Vec<f64> {
        let mut u = self.u.clone();
        let mut e = self.e.clone();
        let mut out = Vec::with_capacity(h);
        for step in 0..h {
            let t = self.n + step;
            let mut v = 0.0;
            for (i, ph) in self.phi.iter().enumerate() {
                v += ph * u[t - 1 - i];
            }
            for (j, th) in self.theta.iter().enumerate() {
                v += th * e[t - 1 - j];
            }
            u.push(v);
            e.push(0.0);
            out.push(v + dot(&self.trend.terms(t + 1), &self.beta));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ArimaFit {
    arma: ArmaFit,
    /// Last value of each differencing level below `d`.
    anchors: Vec<f64>,
}

pub(crate) fn fit_arima(y: &[f64], p: usize, d: usize, q: usize) -> Result<ArimaFit, ModelError> {
    require_len(Family::ARIMA, d + p + q + 10, y.len())?;
    let mut level = y.to_vec();
    let mut anchors = Vec::with_capacity(d);
    for _ in 0..d {
        anchors.push(*level.last().expect("non-empty"));
        level = level.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let arma = fit_arma(&level, p, q, Trend::N).map_err(|e| match e {
        ModelError::InsufficientData { needed, got, .. } => ModelError::InsufficientData {
            family: Family::ARIMA,
            needed: needed + d,
            got: got + d,
        },
        other => other,
    })?;
    Ok(ArimaFit { arma, anchors })
}

impl ArimaFit {
    pub fn rmse(&self) -> f64 {
        self.arma.rmse
    }

    pub fn forecast(&self, h: usize) -> Vec<f64> {
        let mut values = self.arma.forecast(h);
        for &anchor in self.anchors.iter().rev() {
            let mut acc = anchor;
            for v in values.iter_mut() {
                acc += *v;
                *v = acc;
            }
        }
        values
    }
}
