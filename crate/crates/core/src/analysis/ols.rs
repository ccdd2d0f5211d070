//! Ordinary least squares with classical standard errors.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::AnalysisError;

/// Relative singular-value cutoff for declaring a design rank deficient.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub t_statistics: Vec<f64>,
    pub p_values: Vec<f64>,
    pub r_squared: f64,
    pub n: usize,
    pub residuals: Vec<f64>,
}

impl OlsFit {
    /// Index of a named regressor.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coef(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|i| self.coefficients[i])
    }

    pub fn p(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|i| self.p_values[i])
    }

    /// Residual standard deviation.
    pub fn sigma(&self) -> f64 {
        let p = self.coefficients.len();
        let rss: f64 = self.residuals.iter().map(|r| r * r).sum();
        (rss / (self.n - p) as f64).sqrt()
    }
}

/// Fits `response ~ design`. The design must already contain any intercept column.
pub fn ols(design: &DMatrix<f64>, response: &[f64]) -> Result<OlsFit, AnalysisError> {
    let names = (0..design.ncols()).map(|i| format!("x{i}")).collect();
    ols_named(design, response, names)
}

pub fn ols_named(design: &DMatrix<f64>, response: &[f64], names: Vec<String>) -> Result<OlsFit, AnalysisError> {
    let (n, p) = design.shape();
    if response.len() != n {
        return Err(AnalysisError::DimensionMismatch {
            rows: n,
            response: response.len(),
        });
    }
    if n <= p || p == 0 {
        return Err(AnalysisError::TooFewObservations { n, p });
    }
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let max_sv = sv.max();
    if !(max_sv > 0.0) || sv.min() / max_sv < RANK_TOL {
        return Err(AnalysisError::RankDeficient);
    }
    let y = DVector::from_column_slice(response);
    let beta = svd
        .solve(&y, max_sv * RANK_TOL)
        .map_err(|_| AnalysisError::RankDeficient)?;
    let fitted = design * &beta;
    let residuals: Vec<f64> = y.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let df = (n - p) as f64;
    let sigma2 = rss / df;

    // (X'X)^-1 = V diag(1/s^2) V'
    let v_t = svd.v_t.as_ref().expect("computed");
    let mut xtx_inv_diag = vec![0.0; p];
    for (j, diag) in xtx_inv_diag.iter_mut().enumerate() {
        *diag = (0..sv.len()).map(|k| (v_t[(k, j)] / sv[k]).powi(2)).sum();
    }
    let t_dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    let mut standard_errors = Vec::with_capacity(p);
    let mut t_statistics = Vec::with_capacity(p);
    let mut p_values = Vec::with_capacity(p);
    for j in 0..p {
        let se = (sigma2 * xtx_inv_diag[j]).sqrt();
        let b = beta[j];
        let (t, pv) = if se > 0.0 {
            let t = b / se;
            (t, (2.0 * t_dist.sf(t.abs())).clamp(0.0, 1.0))
        } else if b == 0.0 {
            (0.0, 1.0)
        } else {
            (b.signum() * f64::INFINITY, 0.0)
        };
        standard_errors.push(se);
        t_statistics.push(t);
        p_values.push(pv);
    }
    let mean = response.iter().sum::<f64>() / n as f64;
    let tss: f64 = response.iter().map(|v| (v - mean).powi(2)).sum();
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else if rss == 0.0 { 1.0 } else { 0.0 };

    Ok(OlsFit {
        names,
        coefficients: beta.iter().copied().collect(),
        standard_errors,
        t_statistics,
        p_values,
        r_squared,
        n,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand_distr::{Distribution, StandardNormal};

    fn with_intercept(x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(x.len(), 2, |i, j| if j == 0 { 1.0 } else { x[i] })
    }

    #[test]
    fn noiseless_line() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let fit = ols(&with_intercept(&x), &y).unwrap();
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-12);
        assert!(fit.coefficients[0].abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_slope_recovered() {
        let mut r = rng::stream(9, 0);
        let x: Vec<f64> = (0..500).map(|_| StandardNormal.sample(&mut r)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| 1.0 + 3.0 * v + { let e: f64 = StandardNormal.sample(&mut r); e })
            .collect();
        let fit = ols(&with_intercept(&x), &y).unwrap();
        assert!((fit.coefficients[1] - 3.0).abs() < 0.1);
        assert!(fit.p_values[1] < 1e-10);
        assert!(fit.p_values.iter().all(|p| (0.0..=1.0).contains(p)));
        // residuals orthogonal to each regressor
        for j in 0..2 {
            let dot: f64 = (0..500).map(|i| with_intercept(&x)[(i, j)] * fit.residuals[i]).sum();
            assert!(dot.abs() < 1e-8);
        }
    }

    #[test]
    fn duplicated_column_is_rank_deficient() {
        let m = DMatrix::from_fn(10, 3, |i, j| if j == 0 { 1.0 } else { i as f64 });
        let y: Vec<f64> = (0..10).map(f64::from).collect();
        assert!(matches!(ols(&m, &y), Err(AnalysisError::RankDeficient)));
    }

    #[test]
    fn too_few_rows() {
        let m = DMatrix::from_fn(2, 2, |i, j| (i + j) as f64);
        assert!(matches!(ols(&m, &[1.0, 2.0]), Err(AnalysisError::TooFewObservations { .. })));
    }

    #[test]
    fn hand_computed_standard_error() {
        // y = [1, 2, 2, 4] on x = [0, 1, 2, 3]: b1 = 0.9, b0 = 0.9,
        // RSS = 0.7, sigma^2 = 0.35, Sxx = 5, se(b1) = sqrt(0.07)
        let x = [0.0, 1.0, 2.0, 3.0];
        let fit = ols(&with_intercept(&x), &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!((fit.coefficients[1] - 0.9).abs() < 1e-12);
        assert!((fit.coefficients[0] - 0.9).abs() < 1e-12);
        assert!((fit.standard_errors[1] - 0.07f64.sqrt()).abs() < 1e-12);
    }
}
