//! Paired comparison of every transform against the untransformed case.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{benjamini_hochberg, wilcoxon_signed_rank, AnalysisError};
use crate::harness::{ExperimentRecord, Status};
use crate::models::Family;
use crate::transforms::PIPELINE_IDS;

/// Datasets whose values sit near zero, where sMAPE is uninformative.
pub const SMAPE_UNFRIENDLY: [&str; 3] = ["baseline", "increasing_variance", "autoregressive"];
pub const SIGNIFICANCE: f64 = 0.05;
pub const NONE_ID: &str = "none";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub transform_id: String,
    pub n_pairs: usize,
    pub mean_smape: Option<f64>,
    pub none_smape: Option<f64>,
    pub statistic: Option<f64>,
    pub p_raw: Option<f64>,
    pub p_bh: Option<f64>,
    pub significant: bool,
    /// Every paired difference was zero.
    pub degenerate: bool,
    /// No complete pair exists for this transform.
    pub insufficient: bool,
}

type PairKey = (String, Family, usize);

/// sMAPE of ok records keyed by transform, then (dataset, family, horizon).
pub(crate) fn smape_by_transform<'a>(
    records: impl IntoIterator<Item = &'a ExperimentRecord>,
) -> BTreeMap<String, BTreeMap<PairKey, f64>> {
    let mut out: BTreeMap<String, BTreeMap<PairKey, f64>> = BTreeMap::new();
    for r in records {
        if r.status != Status::Ok {
            continue;
        }
        if let Some(s) = r.smape() {
            out.entry(r.transform_id.clone())
                .or_default()
                .insert((r.dataset_id.clone(), r.model_family, r.horizon), s);
        }
    }
    out
}

/// Transform ids in the canonical pipeline order, unknown ids last.
pub(crate) fn ordered_transforms<'a>(ids: impl IntoIterator<Item = &'a String>) -> Vec<String> {
    let mut ids: Vec<String> = ids.into_iter().cloned().collect();
    ids.sort_by_key(|id| (PIPELINE_IDS.iter().position(|p| p == id).unwrap_or(usize::MAX), id.clone()));
    ids.dedup();
    ids
}

fn mean(x: &[f64]) -> Option<f64> {
    (!x.is_empty()).then(|| x.iter().sum::<f64>() / x.len() as f64)
}

/// One row per non-none transform, BH-adjusted across the rows that have pairs.
pub fn compare_transforms(records: &[ExperimentRecord], exclude: &[&str]) -> Result<Vec<ComparisonRow>, AnalysisError> {
    if !records.iter().any(|r| r.transform_id == NONE_ID) {
        return Err(AnalysisError::MissingBaseline);
    }
    let kept = records.iter().filter(|r| !exclude.contains(&r.dataset_id.as_str()));
    let by_transform = smape_by_transform(kept);
    let empty = BTreeMap::new();
    let none = by_transform.get(NONE_ID).unwrap_or(&empty);
    let all_ids = ordered_transforms(records.iter().map(|r| &r.transform_id));
    let mut rows = Vec::new();
    for id in all_ids.iter().filter(|id| *id != NONE_ID) {
        let cells = by_transform.get(id).unwrap_or(&empty);
        let (mut t, mut n) = (Vec::new(), Vec::new());
        for (key, v) in cells {
            if let Some(b) = none.get(key) {
                t.push(*v);
                n.push(*b);
            }
        }
        let mut row = ComparisonRow {
            transform_id: id.clone(),
            n_pairs: t.len(),
            mean_smape: mean(&t),
            none_smape: mean(&n),
            statistic: None,
            p_raw: None,
            p_bh: None,
            significant: false,
            degenerate: false,
            insufficient: t.is_empty(),
        };
        if !t.is_empty() {
            let diffs: Vec<f64> = t.iter().zip(&n).map(|(a, b)| a - b).collect();
            let w = wilcoxon_signed_rank(&diffs);
            row.statistic = Some(w.statistic);
            row.p_raw = Some(w.p_value);
            row.degenerate = w.degenerate;
        }
        rows.push(row);
    }
    let raw: Vec<f64> = rows.iter().filter_map(|r| r.p_raw).collect();
    let adjusted = benjamini_hochberg(&raw)?;
    let mut it = adjusted.into_iter();
    for row in rows.iter_mut().filter(|r| r.p_raw.is_some()) {
        let p = it.next().expect("one adjusted value per raw p");
        row.p_bh = Some(p);
        row.significant = p < SIGNIFICANCE;
    }
    Ok(rows)
}
