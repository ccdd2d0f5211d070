//! The factorial experiment: split, transform, measure stationarity, tune,
//! forecast, invert and score every (dataset, transform, model, horizon) cell.

mod suite;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{evaluate, MetricSet};
use crate::models::{self, Category, Family, ModelSpec, TuneLogEntry};
use crate::rng::derive_seed;
use crate::series::{load_csv, train_test_split, TimeSeries};
use crate::stationarity::{consensus, StationarityReport};
use crate::synthgen::{self, STANDARD_IDS};
use crate::transforms::{fit_transform, inverse_transform, PipelineSpec, TransformState};

pub use suite::{
    read_records, run_suite, run_suite_partial, write_csv, SuiteSummary, CSV_FILE, JOURNAL_FILE, MANIFEST_FILE,
    RECORDS_FILE, TIMINGS_FILE, TUNING_LOG_FILE,
};

/// Shortest transformed training series a model is fitted on.
pub const MIN_TRANSFORMED_LEN: usize = 30;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_LENGTH: usize = 200;
pub const DEFAULT_BUDGET: usize = 50;
pub const DEFAULT_HORIZONS: [usize; 3] = [4, 12, 24];
/// Environment variable capping the worker pool.
pub const WORKERS_ENV: &str = "STATLAB_WORKERS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("dataset {id}: {reason}")]
    Dataset { id: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed record on line {line}: {reason}")]
    Malformed { path: PathBuf, line: usize, reason: String },
}

/// A standard-suite id or a CSV file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DatasetRef {
    Standard(String),
    Csv {
        name: String,
        path: PathBuf,
        column: String,
        frequency: usize,
    },
}

impl DatasetRef {
    pub fn id(&self) -> &str {
        match self {
            DatasetRef::Standard(id) => id,
            DatasetRef::Csv { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetRef>,
    pub transforms: Vec<PipelineSpec>,
    pub families: Vec<Family>,
    pub horizons: Vec<usize>,
    pub seed: u64,
    pub tuning_budget: usize,
    /// Length of each generated standard-suite series.
    pub series_length: usize,
    pub output_path: PathBuf,
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            datasets: STANDARD_IDS.iter().map(|id| DatasetRef::Standard(id.to_string())).collect(),
            transforms: PipelineSpec::all(),
            families: Family::ALL.to_vec(),
            horizons: DEFAULT_HORIZONS.to_vec(),
            seed: DEFAULT_SEED,
            tuning_budget: DEFAULT_BUDGET,
            series_length: DEFAULT_LENGTH,
            output_path: PathBuf::from("results"),
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn cell_count(&self) -> usize {
        self.datasets.len() * self.transforms.len() * self.families.len() * self.horizons.len()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| Err(HarnessError::Config(msg.to_string()));
        if self.datasets.is_empty() || self.transforms.is_empty() || self.families.is_empty() || self.horizons.is_empty() {
            return bad("datasets, transforms, models and horizons must all be non-empty");
        }
        if self.horizons.contains(&0) {
            return bad("horizons must be at least 1");
        }
        if self.tuning_budget == 0 {
            return bad("tuning_budget must be at least 1");
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1");
        }
        let mut ids: Vec<&str> = self.datasets.iter().map(DatasetRef::id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return bad("dataset ids must be unique");
        }
        for d in &self.datasets {
            if let DatasetRef::Standard(id) = d {
                if !STANDARD_IDS.contains(&id.as_str()) {
                    return Err(HarnessError::Config(format!("unknown standard dataset '{id}'")));
                }
            }
        }
        Ok(())
    }

    /// Materializes the configured datasets, in config order.
    pub fn load_datasets(&self) -> Result<Vec<TimeSeries>, HarnessError> {
        let suite = if self.datasets.iter().any(|d| matches!(d, DatasetRef::Standard(_))) {
            synthgen::standard_suite(self.seed, self.series_length).map_err(|e| HarnessError::Dataset {
                id: "standard suite".into(),
                reason: e.to_string(),
            })?
        } else {
            Vec::new()
        };
        self.datasets
            .iter()
            .map(|d| match d {
                DatasetRef::Standard(id) => suite
                    .iter()
                    .find(|(name, _)| name == id)
                    .map(|(_, s)| s.clone())
                    .ok_or_else(|| HarnessError::Config(format!("unknown standard dataset '{id}'"))),
                DatasetRef::Csv {
                    name,
                    path,
                    column,
                    frequency,
                } => load_csv(path, column, *frequency)
                    .and_then(|s| TimeSeries::with_origin(name.clone(), s.frequency(), s.values().to_vec(), s.origin().clone()))
                    .map_err(|e| HarnessError::Dataset {
                        id: name.clone(),
                        reason: e.to_string(),
                    }),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    TransformFailed,
    FitFailed,
    InverseFailed,
}

/// One cell of the factorial design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub dataset_id: String,
    pub transform_id: String,
    pub model_family: Family,
    pub category: Category,
    pub horizon: usize,
    pub seed: u64,
    pub status: Status,
    pub error: Option<String>,
    pub metrics: Option<MetricSet>,
    pub stationarity: Option<StationarityReport>,
    /// Set when the transformed series could not be scored by any test of a dimension.
    pub stationarity_error: Option<String>,
    pub tuned_spec: Option<ModelSpec>,
    /// Seconds; kept out of the record file so reruns stay byte-identical.
    #[serde(skip)]
    pub wall_time: f64,
}

impl ExperimentRecord {
    pub fn key(&self) -> CellKey {
        CellKey {
            dataset_id: self.dataset_id.clone(),
            transform_id: self.transform_id.clone(),
            family: self.model_family.id().to_string(),
            horizon: self.horizon,
        }
    }

    pub fn smape(&self) -> Option<f64> {
        self.metrics.map(|m| m.smape)
    }
}

/// Identity and sort key of a cell: lexicographic on the ids, then horizon.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub dataset_id: String,
    pub transform_id: String,
    pub family: String,
    pub horizon: usize,
}

/// Per-cell seed.
pub fn cell_seed(seed: u64, dataset_id: &str, transform_id: &str, family: Family, horizon: usize) -> u64 {
    derive_seed(seed, &[dataset_id, transform_id, family.id(), &horizon.to_string()])
}

/// Steps 1 to 3, shared by every model family of a cell.
#[derive(Debug, Clone)]
pub struct Prepared {
    dataset_id: String,
    transform_id: String,
    horizon: usize,
    stage: Result<Stage, String>,
}

#[derive(Debug, Clone)]
struct Stage {
    train: TimeSeries,
    test: Vec<f64>,
    transformed: TimeSeries,
    state: TransformState,
    stationarity: Result<StationarityReport, String>,
}

/// Splits, transforms and measures stationarity of the transformed training data.
pub fn prepare(dataset: &TimeSeries, transform: &PipelineSpec, horizon: usize) -> Prepared {
    let transform = transform.clone().with_seasonal_period(dataset.frequency());
    let stage = (|| {
        let split = train_test_split(dataset, horizon).map_err(|e| e.to_string())?;
        let (transformed, state) = fit_transform(&split.train, &transform).map_err(|e| e.to_string())?;
        if transformed.len() < MIN_TRANSFORMED_LEN {
            return Err(format!(
                "transformed training series has {} observations, need {MIN_TRANSFORMED_LEN}",
                transformed.len()
            ));
        }
        let stationarity = consensus(&transformed).map_err(|e| e.to_string());
        Ok(Stage {
            test: split.test.values().to_vec(),
            train: split.train,
            transformed,
            state,
            stationarity,
        })
    })();
    Prepared {
        dataset_id: dataset.name().to_string(),
        transform_id: transform.id(),
        horizon,
        stage,
    }
}

/// Steps 4 to 7 for one family. Never fails; errors become the record status.
pub fn run_prepared(prepared: &Prepared, family: Family, seed: u64, budget: usize) -> (ExperimentRecord, Vec<TuneLogEntry>) {
    let start = std::time::Instant::now();
    let mut record = ExperimentRecord {
        dataset_id: prepared.dataset_id.clone(),
        transform_id: prepared.transform_id.clone(),
        model_family: family,
        category: family.category(),
        horizon: prepared.horizon,
        seed,
        status: Status::TransformFailed,
        error: None,
        metrics: None,
        stationarity: None,
        stationarity_error: None,
        tuned_spec: None,
        wall_time: 0.0,
    };
    let mut log = Vec::new();
    match &prepared.stage {
        Err(e) => record.error = Some(e.clone()),
        Ok(stage) => {
            match &stage.stationarity {
                Ok(r) => record.stationarity = Some(r.clone()),
                Err(e) => record.stationarity_error = Some(e.clone()),
            }
            let outcome = finish(stage, family, seed, budget, &mut record, &mut log);
            match outcome {
                Ok(metrics) => {
                    record.status = Status::Ok;
                    record.metrics = Some(metrics);
                }
                Err((status, e)) => {
                    record.status = status;
                    record.error = Some(e);
                }
            }
        }
    }
    record.wall_time = start.elapsed().as_secs_f64();
    (record, log)
}

fn finish(
    stage: &Stage,
    family: Family,
    seed: u64,
    budget: usize,
    record: &mut ExperimentRecord,
    log: &mut Vec<TuneLogEntry>,
) -> Result<MetricSet, (Status, String)> {
    let fit_err = |e: models::ModelError| (Status::FitFailed, e.to_string());
    let tuned = models::tune(family, &stage.transformed, budget, seed).map_err(fit_err)?;
    *log = tuned.log;
    record.tuned_spec = Some(tuned.spec.clone());
    let model = models::fit(&tuned.spec, &stage.transformed).map_err(fit_err)?;
    let forecast = model.forecast(record.horizon).map_err(fit_err)?;
    let inv_err = |e: String| (Status::InverseFailed, e);
    let predicted = inverse_transform(&forecast.values, &stage.state).map_err(|e| inv_err(e.to_string()))?;
    if predicted.iter().any(|v| !v.is_finite()) {
        return Err(inv_err("inverse transform produced non-finite values".into()));
    }
    evaluate(&stage.test, &predicted, stage.train.values()).map_err(|e| inv_err(e.to_string()))
}

/// Runs all seven steps for one cell.
pub fn run_experiment(
    dataset: &TimeSeries,
    transform: &PipelineSpec,
    family: Family,
    horizon: usize,
    seed: u64,
    budget: usize,
) -> ExperimentRecord {
    run_prepared(&prepare(dataset, transform, horizon), family, seed, budget).0
}
