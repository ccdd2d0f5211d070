//! Whether a transform targets the non-stationarity a dataset is known to have.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::compare::{smape_by_transform, NONE_ID};
use super::AnalysisError;
use crate::harness::ExperimentRecord;
use crate::synthgen::STANDARD_IDS;
use crate::transforms::{PipelineSpec, StepKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Trend,
    UnitRoot,
    Seasonality,
    LongMemory,
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchClass {
    Matched,
    Mismatched,
    Excluded,
}

/// Non-stationarity a transform is designed to remove; pipelines take the union.
pub fn transform_targets(transform_id: &str) -> Result<Vec<Target>, AnalysisError> {
    let spec: PipelineSpec = transform_id
        .parse()
        .map_err(|_| AnalysisError::UnknownId(transform_id.to_string()))?;
    let mut out = Vec::new();
    for step in spec.steps() {
        out.extend_from_slice(match step {
            StepKind::None => &[],
            StepKind::Difference => &[Target::Trend, Target::UnitRoot],
            StepKind::SeasonalDifference { .. } => &[Target::Seasonality],
            StepKind::FractionalDifference => &[Target::UnitRoot, Target::LongMemory],
            StepKind::Log | StepKind::BoxCox => &[Target::Variance],
        });
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Known non-stationarity of a standard-suite dataset.
pub fn dataset_properties(dataset_id: &str) -> Result<&'static [Target], AnalysisError> {
    use Target::*;
    Ok(match dataset_id {
        "baseline" | "autoregressive" => &[],
        "linear_trend" | "trend_autoregressive" => &[Trend],
        "seasonal" => &[Seasonality],
        "increasing_variance" => &[Variance],
        "multiplicative_variance" => &[Trend, Variance],
        "trend_seasonal" => &[Trend, Seasonality],
        "all_components" => &[Trend, Seasonality, Variance],
        "random_walk" => &[UnitRoot],
        "random_walk_drift" => &[Trend, UnitRoot],
        other => return Err(AnalysisError::UnknownId(other.to_string())),
    })
}

pub fn classify_match(transform_id: &str, dataset_id: &str) -> Result<MatchClass, AnalysisError> {
    let targets = transform_targets(transform_id)?;
    let props = dataset_properties(dataset_id)?;
    Ok(if targets.is_empty() {
        MatchClass::Excluded
    } else if targets.iter().any(|t| props.contains(t)) {
        MatchClass::Matched
    } else {
        MatchClass::Mismatched
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRow {
    pub match_type: MatchClass,
    pub n: usize,
    pub mean_smape: Option<f64>,
    pub none_smape: Option<f64>,
    pub mean_diff: Option<f64>,
    /// Share of pairs where the transform beat none.
    pub pct_improved: Option<f64>,
}

/// Matched and mismatched pairs against none. Datasets outside the standard
/// suite have no declared properties and are skipped.
pub fn matched_summary(records: &[ExperimentRecord]) -> Result<Vec<MatchRow>, AnalysisError> {
    let by_transform = smape_by_transform(records);
    let none = by_transform.get(NONE_ID).ok_or(AnalysisError::MissingBaseline)?;
    let mut groups: BTreeMap<MatchClass, Vec<(f64, f64)>> = BTreeMap::new();
    for (transform, cells) in &by_transform {
        for (key, v) in cells {
            if !STANDARD_IDS.contains(&key.0.as_str()) {
                continue;
            }
            let class = classify_match(transform, &key.0)?;
            if class == MatchClass::Excluded {
                continue;
            }
            if let Some(b) = none.get(key) {
                groups.entry(class).or_default().push((*v, *b));
            }
        }
    }
    Ok([MatchClass::Matched, MatchClass::Mismatched]
        .into_iter()
        .map(|class| {
            let pairs = groups.remove(&class).unwrap_or_default();
            let n = pairs.len();
            let avg = |f: &dyn Fn(&(f64, f64)) -> f64| (n > 0).then(|| pairs.iter().map(f).sum::<f64>() / n as f64);
            MatchRow {
                match_type: class,
                n,
                mean_smape: avg(&|p| p.0),
                none_smape: avg(&|p| p.1),
                mean_diff: avg(&|p| p.0 - p.1),
                pct_improved: avg(&|p| f64::from(u8::from(p.0 < p.1)) * 100.0),
            }
        })
        .collect())
}
