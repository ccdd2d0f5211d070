//! Box-Cox power transform with a maximum-likelihood `lambda`.

use super::TransformError;

pub const LAMBDA_MIN: f64 = -2.0;
pub const LAMBDA_MAX: f64 = 2.0;
/// Value the series minimum is moved to when a positivity shift is needed.
pub const SHIFT_FLOOR: f64 = 1e-6;
pub const BOXCOX_MIN_LEN: usize = 10;

pub fn transform_value(y: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        y.ln()
    } else {
        (y.powf(lambda) - 1.0) / lambda
    }
}

/// Inverse of [`transform_value`]; `None` when `lambda*x + 1` leaves the domain.
pub fn inverse_value(x: f64, lambda: f64) -> Option<f64> {
    let y = if lambda == 0.0 {
        x.exp()
    } else {
        let base = lambda * x + 1.0;
        if base < 0.0 {
            return None;
        }
        base.powf(1.0 / lambda)
    };
    y.is_finite().then_some(y)
}

/// Profile log-likelihood of the Box-Cox model at `lambda` (positive data).
pub fn profile_log_likelihood(data: &[f64], lambda: f64) -> f64 {
    let n = data.len() as f64;
    let transformed: Vec<f64> = data.iter().map(|&y| transform_value(y, lambda)).collect();
    let mean = transformed.iter().sum::<f64>() / n;
    let var = transformed.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let log_jacobian: f64 = data.iter().map(|y| y.ln()).sum();
    -0.5 * n * var.ln() + (lambda - 1.0) * log_jacobian
}

/// Positivity shift: zero when every value is positive, otherwise `1e-6 - min`.
pub fn positivity_shift(values: &[f64]) -> f64 {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        0.0
    } else {
        SHIFT_FLOOR - min
    }
}

/// Maximum-likelihood `lambda` on `[-2, 2]` and the positivity shift used.
///
/// A 0.01 grid locates the peak; golden-section search refines it.
pub fn boxcox_lambda(values: &[f64]) -> Result<(f64, f64), TransformError> {
    if values.len() < BOXCOX_MIN_LEN {
        return Err(TransformError::SeriesTooShort {
            step: "boxcox".into(),
            needed: BOXCOX_MIN_LEN,
            got: values.len(),
        });
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Err(TransformError::ConstantSeries);
    }
    let shift = positivity_shift(values);
    let data: Vec<f64> = values.iter().map(|v| v + shift).collect();
    let objective = |lambda: f64| {
        let ll = profile_log_likelihood(&data, lambda);
        if ll.is_nan() {
            f64::NEG_INFINITY
        } else {
            ll
        }
    };

    let steps = 400;
    let grid_step = (LAMBDA_MAX - LAMBDA_MIN) / steps as f64;
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..=steps {
        let ll = objective(LAMBDA_MIN + grid_step * i as f64);
        if ll > best {
            best = ll;
            best_i = i;
        }
    }
    if !best.is_finite() {
        return Err(TransformError::ConstantSeries);
    }
    let center = LAMBDA_MIN + grid_step * best_i as f64;
    let mut lo = (center - grid_step).max(LAMBDA_MIN);
    let mut hi = (center + grid_step).min(LAMBDA_MAX);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (objective(a), objective(b));
    while hi - lo > 1e-9 {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = objective(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = objective(b);
        }
    }
    let refined = 0.5 * (lo + hi);
    let lambda = if objective(refined) >= best { refined } else { center };
    Ok((lambda, shift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normals(seed: u64, n: usize) -> Vec<f64> {
        let mut r = rng::stream(seed, 5);
        (0..n).map(|_| StandardNormal.sample(&mut r)).collect()
    }

    /// Brute-force MLE over a 1e-3 grid.
    fn grid_oracle(data: &[f64]) -> f64 {
        (0..=4000)
            .map(|i| -2.0 + 1e-3 * i as f64)
            .map(|l| (l, profile_log_likelihood(data, l)))
            .fold((0.0, f64::NEG_INFINITY), |acc, (l, ll)| if ll > acc.1 { (l, ll) } else { acc })
            .0
    }

    #[test]
    fn lognormal_lambda_near_zero() {
        let data: Vec<f64> = normals(1, 500).iter().map(|z| z.exp()).collect();
        let (lambda, shift) = boxcox_lambda(&data).unwrap();
        assert_eq!(shift, 0.0);
        assert!(lambda.abs() <= 0.2, "{lambda}");
        assert!((lambda - grid_oracle(&data)).abs() <= 1.5e-3);
    }

    #[test]
    fn shifted_gaussian_lambda_centred_on_one() {
        // The likelihood is nearly flat in lambda here, so single draws
        // scatter widely; the median over seeds sits near one.
        let mut lambdas: Vec<f64> = (0..41)
            .map(|seed| {
                let data: Vec<f64> = normals(100 + seed, 500).iter().map(|z| 100.0 + z).collect();
                let (lambda, _) = boxcox_lambda(&data).unwrap();
                if seed < 5 {
                    assert!((lambda - grid_oracle(&data)).abs() <= 1.5e-3);
                }
                lambda
            })
            .collect();
        lambdas.sort_by(f64::total_cmp);
        assert!((lambdas[20] - 1.0).abs() <= 0.5, "{}", lambdas[20]);
    }

    #[test]
    fn zero_lambda_is_log() {
        for y in [1e-6, 0.5, 1.0, 3.0, 1e6] {
            assert_eq!(transform_value(y, 0.0), y.ln());
        }
    }

    #[test]
    fn shift_and_errors() {
        assert_eq!(positivity_shift(&[1.0, 2.0]), 0.0);
        assert!((positivity_shift(&[-3.0, 2.0]) - (3.0 + 1e-6)).abs() < 1e-15);
        assert!(matches!(boxcox_lambda(&[2.0; 20]), Err(TransformError::ConstantSeries)));
        assert!(matches!(boxcox_lambda(&[1.0, 2.0]), Err(TransformError::SeriesTooShort { .. })));
    }

    #[test]
    fn inverse_domain() {
        assert!(inverse_value(-3.0, 0.5).is_none());
        let x = transform_value(7.0, 0.5);
        assert!((inverse_value(x, 0.5).unwrap() - 7.0).abs() < 1e-12);
    }
}
