//! Parallel execution of the full cross product with a resumable journal.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{cell_seed, prepare, run_prepared, CellKey, ExperimentConfig, ExperimentRecord, HarnessError, Status, WORKERS_ENV};
use crate::models::{Family, TuneLogEntry};

pub const RECORDS_FILE: &str = "records.jsonl";
pub const CSV_FILE: &str = "records.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const JOURNAL_FILE: &str = "journal.jsonl";
pub const TIMINGS_FILE: &str = "timings.csv";
pub const TUNING_LOG_FILE: &str = "tuning_log.jsonl";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteSummary {
    pub output_dir: PathBuf,
    pub records_path: PathBuf,
    pub total: usize,
    pub ok: usize,
    /// Cells taken from an earlier interrupted run.
    pub resumed: usize,
    pub executed: usize,
    /// False when a cell limit stopped the run before the record file was written.
    pub complete: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JournalLine {
    fingerprint: String,
    record: ExperimentRecord,
    wall_time: f64,
    tuning: Vec<TuneLogEntry>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Hash of everything in the config that affects record contents.
fn fingerprint(config: &ExperimentConfig) -> String {
    let mut c = config.clone();
    c.output_path = PathBuf::new();
    c.workers = None;
    let text = serde_json::to_string(&c).expect("config serializes");
    hex(&Sha256::digest(text.as_bytes()))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn worker_count(config: &ExperimentConfig) -> usize {
    let cap = std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|n| *n > 0);
    let wanted = config.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    cap.map_or(wanted, |c| wanted.min(c)).max(1)
}

fn load_journal(path: &Path, fingerprint: &str) -> HashMap<CellKey, JournalLine> {
    let Ok(file) = File::open(path) else {
        return HashMap::new();
    };
    // a torn final line from an interrupted write is simply ignored
    BufReader::new(file)
        .lines()
        .map_while(Result::ok)
        .filter_map(|l| serde_json::from_str::<JournalLine>(&l).ok())
        .filter(|j| j.fingerprint == fingerprint)
        .map(|j| (j.record.key(), j))
        .collect()
}

/// Runs every cell and writes the record files.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteSummary, HarnessError> {
    run_suite_partial(config, None)
}

/// Like [`run_suite`], but stops after executing `limit` new cells.
///
/// Completed cells are journaled, so a later call with the same config
/// resumes where this one stopped.
pub fn run_suite_partial(config: &ExperimentConfig, limit: Option<usize>) -> Result<SuiteSummary, HarnessError> {
    config.validate()?;
    let datasets = config.load_datasets()?;
    let dir = &config.output_path;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let fp = fingerprint(config);
    let journal_path = dir.join(JOURNAL_FILE);
    let mut done = load_journal(&journal_path, &fp);

    // cells grouped by (dataset, transform, horizon) so the transform and
    // stationarity report are computed once for all families
    let mut groups = Vec::new();
    let mut wanted = std::collections::HashSet::new();
    let mut budget_left = limit.unwrap_or(usize::MAX);
    for dataset in &datasets {
        for transform in &config.transforms {
            for &horizon in &config.horizons {
                let mut pending: Vec<Family> = Vec::new();
                for &family in &config.families {
                    let key = CellKey {
                        dataset_id: dataset.name().to_string(),
                        transform_id: transform.id(),
                        family: family.id().to_string(),
                        horizon,
                    };
                    let is_done = done.contains_key(&key);
                    wanted.insert(key);
                    if !is_done && budget_left > 0 {
                        budget_left -= 1;
                        pending.push(family);
                    }
                }
                if !pending.is_empty() {
                    groups.push((dataset, transform, horizon, pending));
                }
            }
        }
    }
    done.retain(|k, _| wanted.contains(k));
    let resumed = done.len();

    let journal = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&journal_path)
        .map_err(io_err(&journal_path))?;
    let journal = Mutex::new(journal);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(config))
        .build()
        .map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?;
    let fresh: Vec<Result<JournalLine, HarnessError>> = pool.install(|| {
        groups
            .par_iter()
            .flat_map_iter(|(dataset, transform, horizon, families)| {
                let prepared = prepare(dataset, transform, *horizon);
                families
                    .iter()
                    .map(|&family| {
                        let seed = cell_seed(config.seed, dataset.name(), &transform.id(), family, *horizon);
                        let (record, tuning) = run_prepared(&prepared, family, seed, config.tuning_budget);
                        let line = JournalLine {
                            fingerprint: fp.clone(),
                            wall_time: record.wall_time,
                            record,
                            tuning,
                        };
                        let mut text = serde_json::to_string(&line).expect("record serializes");
                        text.push('\n');
                        let mut f = journal.lock().unwrap_or_else(|p| p.into_inner());
                        f.write_all(text.as_bytes()).map_err(io_err(&journal_path))?;
                        Ok(line)
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    });
    let executed = fresh.len();
    for line in fresh {
        let line = line?;
        done.insert(line.record.key(), line);
    }
    let total = config.cell_count();
    let records_path = dir.join(RECORDS_FILE);
    if done.len() < total {
        return Ok(SuiteSummary {
            output_dir: dir.clone(),
            records_path,
            total,
            ok: 0,
            resumed,
            executed,
            complete: false,
        });
    }

    let mut lines: Vec<JournalLine> = done.into_values().collect();
    lines.sort_by_key(|l| l.record.key());
    for l in &mut lines {
        l.record.wall_time = l.wall_time;
    }
    let records: Vec<ExperimentRecord> = lines.iter().map(|l| l.record.clone()).collect();
    let records_text = write_jsonl(&records_path, &records)?;
    write_csv(&records, &dir.join(CSV_FILE))?;
    write_tuning_log(&dir.join(TUNING_LOG_FILE), &lines)?;
    write_timings(&dir.join(TIMINGS_FILE), &records)?;
    let ok = records.iter().filter(|r| r.status == Status::Ok).count();
    write_manifest(&dir.join(MANIFEST_FILE), config, &records, &records_text)?;
    fs::remove_file(&journal_path).map_err(io_err(&journal_path))?;
    Ok(SuiteSummary {
        output_dir: dir.clone(),
        records_path,
        total,
        ok,
        resumed,
        executed,
        complete: true,
    })
}

fn write_atomic(path: &Path, text: &str) -> Result<(), HarnessError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn write_jsonl(path: &Path, records: &[ExperimentRecord]) -> Result<String, HarnessError> {
    let mut text = String::new();
    for r in records {
        text.push_str(&serde_json::to_string(r).expect("record serializes"));
        text.push('\n');
    }
    write_atomic(path, &text)?;
    Ok(text)
}

fn write_tuning_log(path: &Path, lines: &[JournalLine]) -> Result<(), HarnessError> {
    let mut text = String::new();
    for l in lines {
        let cell = l.record.key();
        for entry in &l.tuning {
            let row = serde_json::json!({ "cell": cell, "entry": entry });
            text.push_str(&row.to_string());
            text.push('\n');
        }
    }
    write_atomic(path, &text)
}

fn write_timings(path: &Path, records: &[ExperimentRecord]) -> Result<(), HarnessError> {
    let mut text = String::from("dataset_id,transform_id,model_family,horizon,wall_time\n");
    for r in records {
        text.push_str(&format!(
            "{},{},{},{},{:.6}\n",
            r.dataset_id, r.transform_id, r.model_family, r.horizon, r.wall_time
        ));
    }
    write_atomic(path, &text)
}

#[derive(Serialize)]
struct Manifest<'a> {
    code_version: &'static str,
    seed: u64,
    cells: usize,
    status_counts: HashMap<&'static str, usize>,
    records_sha256: String,
    config: &'a ExperimentConfig,
}

fn write_manifest(path: &Path, config: &ExperimentConfig, records: &[ExperimentRecord], text: &str) -> Result<(), HarnessError> {
    let mut status_counts = HashMap::new();
    for r in records {
        let name = match r.status {
            Status::Ok => "ok",
            Status::TransformFailed => "transform_failed",
            Status::FitFailed => "fit_failed",
            Status::InverseFailed => "inverse_failed",
        };
        *status_counts.entry(name).or_insert(0) += 1;
    }
    let manifest = Manifest {
        code_version: env!("CARGO_PKG_VERSION"),
        seed: config.seed,
        cells: records.len(),
        status_counts,
        records_sha256: hex(&Sha256::digest(text.as_bytes())),
        config,
    };
    // Value maps are sorted, which keeps the status counts in a stable order
    let value = serde_json::to_value(&manifest).expect("manifest serializes");
    write_atomic(path, &serde_json::to_string_pretty(&value).expect("manifest serializes"))
}

#[derive(Serialize)]
struct CsvRow<'a> {
    dataset_id: &'a str,
    transform_id: &'a str,
    model_family: &'a str,
    category: &'a str,
    horizon: usize,
    seed: u64,
    status: &'a str,
    smape: Option<f64>,
    rmse: Option<f64>,
    mae: Option<f64>,
    mase: Option<f64>,
    r_trend: Option<f64>,
    r_var: Option<f64>,
    r_seasonal: Option<f64>,
    tuned_spec: String,
    error: &'a str,
}

/// Flattened one-row-per-record CSV.
pub fn write_csv(records: &[ExperimentRecord], path: &Path) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        let status = serde_json::to_value(r.status).expect("status serializes");
        let category = serde_json::to_value(r.category).expect("category serializes");
        let row = CsvRow {
            dataset_id: &r.dataset_id,
            transform_id: &r.transform_id,
            model_family: r.model_family.id(),
            category: category.as_str().unwrap_or_default(),
            horizon: r.horizon,
            seed: r.seed,
            status: status.as_str().unwrap_or_default(),
            smape: r.metrics.map(|m| m.smape),
            rmse: r.metrics.map(|m| m.rmse),
            mae: r.metrics.map(|m| m.mae),
            mase: r.metrics.and_then(|m| m.mase),
            r_trend: r.stationarity.as_ref().map(|s| s.r_trend()),
            r_var: r.stationarity.as_ref().map(|s| s.r_var()),
            r_seasonal: r.stationarity.as_ref().map(|s| s.r_seasonal()),
            tuned_spec: r.tuned_spec.as_ref().map(|s| s.to_json()).unwrap_or_default(),
            error: r.error.as_deref().unwrap_or(""),
        };
        w.serialize(row).map_err(|e| HarnessError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e),
        })?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    })?;
    write_atomic(path, &String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Reads a JSONL record file.
pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| HarnessError::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            reason: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}
