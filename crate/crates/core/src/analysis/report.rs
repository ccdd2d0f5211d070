//! Everything `analyze` produces, its files on disk and a markdown rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::compare::{compare_transforms, ComparisonRow, SMAPE_UNFRIENDLY};
use super::matching::{matched_summary, MatchClass, MatchRow};
use super::mediation::{mediate, mediation_rows, MediationOptions, MediationResult, PathRow};
use super::summary::{summarize, Summary};
use super::AnalysisError;
use crate::harness::{ExperimentRecord, Status};

pub const COMPARISON_FILE: &str = "transform_comparison.csv";
pub const MATCHED_FILE: &str = "matched_pairs.csv";
pub const PATHS_FILE: &str = "mediation_paths.csv";
pub const ANALYSIS_FILE: &str = "analysis.json";
pub const REPORT_FILE: &str = "report.md";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub exclude_smape_unfriendly: bool,
    pub mediation: MediationOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub records: usize,
    pub ok: usize,
    pub excluded_datasets: Vec<String>,
    pub comparison: Vec<ComparisonRow>,
    pub matched: Vec<MatchRow>,
    pub mediation: Option<MediationResult>,
    pub mediation_error: Option<String>,
    pub summary: Summary,
}

pub fn analyze(records: &[ExperimentRecord], options: AnalysisOptions) -> Result<Analysis, AnalysisError> {
    if records.is_empty() {
        return Err(AnalysisError::NoRecords);
    }
    let exclude: &[&str] = if options.exclude_smape_unfriendly { &SMAPE_UNFRIENDLY } else { &[] };
    let (mediation, mediation_error) = match mediate(&mediation_rows(records), options.mediation) {
        Ok(m) => (Some(m), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(Analysis {
        records: records.len(),
        ok: records.iter().filter(|r| r.status == Status::Ok).count(),
        excluded_datasets: exclude.iter().map(|s| s.to_string()).collect(),
        comparison: compare_transforms(records, exclude)?,
        matched: matched_summary(records)?,
        mediation,
        mediation_error,
        summary: summarize(records),
    })
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> AnalysisError + '_ {
    move |source| AnalysisError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| AnalysisError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    for r in rows {
        w.serialize(r).map_err(|e| AnalysisError::Io {
            path: path.to_path_buf(),
            source: e.into(),
        })?;
    }
    w.flush().map_err(io(path))
}

impl Analysis {
    /// Writes every table and figure into `dir`; returns the paths written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, AnalysisError> {
        fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::new();
        let mut put = |name: String, body: String| -> Result<(), AnalysisError> {
            let path = dir.join(name);
            fs::write(&path, body).map_err(io(&path))?;
            written.push(path);
            Ok(())
        };
        put(ANALYSIS_FILE.into(), serde_json::to_string_pretty(self).expect("analysis serializes"))?;
        for g in &self.summary.heatmaps {
            let stem = format!("heatmap_{}", g.title.replace(' ', "_"));
            put(format!("{stem}.csv"), g.to_csv())?;
            put(format!("{stem}.svg"), g.heatmap_svg())?;
        }
        put("by_model.csv".into(), self.summary.by_model.to_csv())?;
        put("by_horizon.csv".into(), self.summary.by_horizon.to_csv())?;
        put("by_horizon.svg".into(), self.summary.by_horizon.line_svg())?;
        put(REPORT_FILE.into(), self.to_markdown())?;

        let mut tables = vec![
            (dir.join(COMPARISON_FILE), write_rows(&dir.join(COMPARISON_FILE), &self.comparison)),
            (dir.join(MATCHED_FILE), write_rows(&dir.join(MATCHED_FILE), &self.matched)),
            (dir.join("best_transform.csv"), write_rows(&dir.join("best_transform.csv"), &self.summary.best)),
            (dir.join("failures.csv"), write_rows(&dir.join("failures.csv"), &self.summary.failures)),
        ];
        if let Some(m) = &self.mediation {
            tables.push((dir.join(PATHS_FILE), write_rows(&dir.join(PATHS_FILE), &m.paths())));
        }
        for (path, result) in tables {
            result?;
            written.push(path);
        }
        Ok(written)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("# Transformation experiment report\n\n");
        let _ = writeln!(s, "{} records, {} scored.", self.records, self.ok);
        let f = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
        let p = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2e}"));

        s.push_str("\n## Transforms against none\n\n");
        if !self.excluded_datasets.is_empty() {
            let _ = writeln!(s, "Excluding {}.\n", self.excluded_datasets.join(", "));
        }
        s.push_str("| transform | pairs | mean sMAPE | none sMAPE | p | p (BH) | significant |\n");
        s.push_str("|---|---:|---:|---:|---:|---:|:---:|\n");
        for r in &self.comparison {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} |",
                r.transform_id,
                r.n_pairs,
                f(r.mean_smape),
                f(r.none_smape),
                p(r.p_raw),
                p(r.p_bh),
                if r.insufficient { "n/a" } else if r.significant { "yes" } else { "no" }
            );
        }

        s.push_str("\n## Matched and mismatched transforms\n\n");
        s.push_str("| match | pairs | mean sMAPE | none sMAPE | difference | improved % |\n");
        s.push_str("|---|---:|---:|---:|---:|---:|\n");
        for r in &self.matched {
            let label = if r.match_type == MatchClass::Matched { "matched" } else { "mismatched" };
            let _ = writeln!(
                s,
                "| {label} | {} | {} | {} | {} | {} |",
                r.n,
                f(r.mean_smape),
                f(r.none_smape),
                f(r.mean_diff),
                r.pct_improved.map_or("-".into(), |v| format!("{v:.1}"))
            );
        }

        s.push_str("\n## Mediation through stationarity\n\n");
        match (&self.mediation, &self.mediation_error) {
            (Some(m), _) => {
                let _ = writeln!(s, "n = {}\n", m.n);
                s.push_str("| path | relationship | coefficient | std. error | p |\n|---|---|---:|---:|---:|\n");
                for PathRow {
                    path,
                    relationship,
                    coefficient,
                    std_error,
                    p_value,
                } in m.paths()
                {
                    let _ = writeln!(s, "| {path} | {relationship} | {coefficient:.4} | {std_error:.4} | {p_value:.2e} |");
                }
            }
            (None, e) => {
                let _ = writeln!(s, "Not estimated: {}", e.as_deref().unwrap_or("no data"));
            }
        }

        s.push_str("\n## Best transform per dataset\n\n| dataset | best | sMAPE | none |\n|---|---|---:|---:|\n");
        for b in &self.summary.best {
            let _ = writeln!(
                s,
                "| {} | {} | {:.4} | {} |",
                b.dataset_id,
                b.best_transform,
                b.best_smape,
                f(b.none_smape)
            );
        }

        s.push_str("\n## Failures\n\n| transform | cells | ok | transform | fit | inverse |\n|---|---:|---:|---:|---:|---:|\n");
        for r in &self.summary.failures {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} |",
                r.transform_id, r.total, r.ok, r.transform_failed, r.fit_failed, r.inverse_failed
            );
        }
        s
    }
}
