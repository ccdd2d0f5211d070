//! Post-processing of experiment records: paired comparisons, matched versus
//! mismatched pairs, mediation regressions and summary tables.

pub mod compare;
pub mod matching;
pub mod mediation;
pub mod ols;
pub mod report;
pub mod signed_rank;
pub mod summary;

use std::path::PathBuf;

use thiserror::Error;

pub use compare::{compare_transforms, ComparisonRow, SMAPE_UNFRIENDLY};
pub use matching::{classify_match, dataset_properties, matched_summary, transform_targets, MatchClass, MatchRow, Target};
pub use mediation::{mediate, mediation_rows, MediationOptions, MediationResult, MediationRow, PathRow};
pub use ols::{ols, ols_named, OlsFit};
pub use report::{analyze, Analysis, AnalysisOptions};
pub use summary::{summarize, BestRow, FailureRow, Grid, Summary};
pub use signed_rank::{benjamini_hochberg, wilcoxon_signed_rank, SignedRankResult, EXACT_MAX_N};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("design has {rows} rows but response has {response}")]
    DimensionMismatch { rows: usize, response: usize },
    #[error("need more than {p} observations, got {n}")]
    TooFewObservations { n: usize, p: usize },
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("p-value {0} outside [0, 1]")]
    PValueOutOfRange(f64),
    #[error("no records to analyze")]
    NoRecords,
    #[error("no untransformed (none) records to compare against")]
    MissingBaseline,
    #[error("{0} does not vary, regression is not identified")]
    InsufficientVariation(String),
    #[error("unknown id '{0}'")]
    UnknownId(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
