//! Small dense least-squares helpers shared by the models and tests.

use nalgebra::{DMatrix, DVector};

/// Builds a row-major design matrix from rows of equal length.
pub(crate) fn design(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let ncols = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

/// Minimum-norm least-squares solution via SVD.
///
/// Rank-deficient designs (e.g. a constant regressor next to a lag of a
/// constant series) get the minimum-norm coefficients instead of an error.
pub(crate) fn lstsq(x: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    if x.ncols() == 0 {
        return DVector::zeros(0);
    }
    let svd = x.clone().svd(true, true);
    let max_sv = svd.singular_values.max();
    let eps = (max_sv * 1e-10).max(f64::MIN_POSITIVE);
    svd.solve(y, eps).unwrap_or_else(|_| DVector::zeros(x.ncols()))
}

/// Solves `(X'X + diag(penalty)) b = X'y`.
pub(crate) fn ridge(x: &DMatrix<f64>, y: &DVector<f64>, penalty: &[f64]) -> DVector<f64> {
    let mut gram = x.transpose() * x;
    for (i, p) in penalty.iter().enumerate() {
        gram[(i, i)] += p;
    }
    let rhs = x.transpose() * y;
    match gram.clone().cholesky() {
        Some(chol) => chol.solve(&rhs),
        None => lstsq(&gram, &rhs),
    }
}
