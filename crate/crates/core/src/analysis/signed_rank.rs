//! Wilcoxon signed-rank test and Benjamini-Hochberg adjustment.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::AnalysisError;

/// Largest number of non-zero differences for which the null distribution is
/// enumerated exactly.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedRankResult {
    /// `min(W+, W-)`.
    pub statistic: f64,
    pub w_plus: f64,
    pub p_value: f64,
    /// Non-zero differences used.
    pub n: usize,
    pub exact: bool,
    /// Every difference was zero.
    pub degenerate: bool,
}

/// Average ranks (1-based) of `values`, ties sharing the mean rank.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided paired signed-rank test on differences.
///
/// Zeros are dropped, tied magnitudes get average ranks. With at most
/// [`EXACT_MAX_N`] non-zero differences the p-value is exact under the
/// tie-aware permutation null; otherwise a normal approximation with tie and
/// continuity corrections is used.
pub fn wilcoxon_signed_rank(diffs: &[f64]) -> SignedRankResult {
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0 && !d.is_nan()).collect();
    let n = nonzero.len();
    if n == 0 {
        return SignedRankResult {
            statistic: 0.0,
            w_plus: 0.0,
            p_value: 1.0,
            n: 0,
            exact: true,
            degenerate: true,
        };
    }
    let magnitudes: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&magnitudes);
    let w_plus: f64 = ranks.iter().zip(&nonzero).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let statistic = w_plus.min(total - w_plus);

    if n <= EXACT_MAX_N {
        // Doubled ranks are integers even with ties.
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let max_sum: usize = doubled.iter().sum();
        let mut counts = vec![0u64; max_sum + 1];
        counts[0] = 1;
        for &r in &doubled {
            for s in (r..=max_sum).rev() {
                counts[s] += counts[s - r];
            }
        }
        let observed = (2.0 * w_plus).round() as usize;
        let below: u64 = counts[..=observed].iter().sum();
        let above: u64 = counts[observed..].iter().sum();
        let p_value = two_sided_exact(below, above, n);
        return SignedRankResult {
            statistic,
            w_plus,
            p_value,
            n,
            exact: true,
            degenerate: false,
        };
    }

    let mean = total / 2.0;
    let mut tie_term = 0.0;
    let mut sorted = magnitudes.clone();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let nf = n as f64;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let diff = w_plus - mean;
    let corrected = if diff == 0.0 { 0.0 } else { diff - 0.5 * diff.signum() };
    let z = if var > 0.0 { corrected / var.sqrt() } else { 0.0 };
    let normal = Normal::new(0.0, 1.0).expect("valid");
    let p_value = (2.0 * normal.sf(z.abs())).min(1.0);
    SignedRankResult {
        statistic,
        w_plus,
        p_value,
        n,
        exact: false,
        degenerate: false,
    }
}

/// `min(1, 2 * min(P(W <= w), P(W >= w)))` from tail counts out of `2^n`.
pub(crate) fn two_sided_exact(below: u64, above: u64, n: usize) -> f64 {
    let patterns = (1u64 << n) as f64;
    (2.0 * below.min(above) as f64 / patterns).min(1.0)
}

/// Benjamini-Hochberg step-up adjusted p-values, in input order.
pub fn benjamini_hochberg(p_values: &[f64]) -> Result<Vec<f64>, AnalysisError> {
    if let Some(&bad) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(AnalysisError::PValueOutOfRange(bad));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));
    let mut adjusted = vec![0.0; m];
    let mut running = 1.0f64;
    for (rank, &idx) in order.iter().enumerate().rev() {
        let candidate = p_values[idx] * (m as f64 / (rank + 1) as f64);
        running = running.min(candidate);
        adjusted[idx] = running.min(1.0);
    }
    Ok(adjusted)
}
