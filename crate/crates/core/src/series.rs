//! Time-series value type, CSV ingestion and train/test splitting.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("series is empty")]
    Empty,
    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("frequency must be at least 1")]
    InvalidFrequency,
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("column '{0}' not found")]
    MissingColumn(String),
    #[error("unparseable value '{cell}' at row {row}")]
    Unparseable { row: usize, cell: String },
    #[error("empty column")]
    EmptyColumn,
    #[error("need at least 2 rows, found {0}")]
    TooFewRows(usize),
    #[error("invalid horizon {horizon} for series of length {len}")]
    InvalidHorizon { horizon: usize, len: usize },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Where a series came from.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Origin {
    /// Generated from a named synthetic DGP.
    Synthetic(String),
    /// Loaded from a CSV file.
    Csv(PathBuf),
    /// Produced by splitting, transforming or deserializing another series.
    #[default]
    Derived,
}

/// Ordered, finite, real-valued observations with a seasonal frequency.
///
/// Immutable after construction. The JSON form is `{name, frequency, values}`;
/// the origin is not serialized and deserializes as [`Origin::Derived`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    name: String,
    frequency: usize,
    values: Vec<f64>,
    #[serde(skip)]
    origin: Origin,
}

#[derive(Deserialize)]
struct RawSeries {
    name: String,
    frequency: usize,
    values: Vec<f64>,
}

impl<'de> Deserialize<'de> for TimeSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawSeries::deserialize(deserializer)?;
        TimeSeries::new(raw.name, raw.frequency, raw.values).map_err(serde::de::Error::custom)
    }
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, frequency: usize, values: Vec<f64>) -> Result<Self, SeriesError> {
        Self::with_origin(name, frequency, values, Origin::Derived)
    }

    pub fn with_origin(
        name: impl Into<String>,
        frequency: usize,
        values: Vec<f64>,
        origin: Origin,
    ) -> Result<Self, SeriesError> {
        if values.is_empty() {
            return Err(SeriesError::Empty);
        }
        if frequency == 0 {
            return Err(SeriesError::InvalidFrequency);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(SeriesError::NonFinite { index, value });
        }
        Ok(Self {
            name: name.into(),
            frequency,
            values,
            origin,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn frequency(&self) -> usize {
        self.frequency
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false for a constructed series; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// A new series sharing name and frequency with different values.
    pub fn derive(&self, values: Vec<f64>) -> Result<Self, SeriesError> {
        Self::new(self.name.clone(), self.frequency, values)
    }

    pub fn to_json(&self) -> Result<String, SeriesError> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, SeriesError> {
        Ok(serde_json::from_str(text)?)
    }
}

impl fmt::Display for TimeSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (n={}, frequency={})", self.name, self.len(), self.frequency)
    }
}

/// Reads one numeric column of a comma-separated file with a header row.
///
/// Row numbers in errors are 1-based data rows (the header is not counted).
/// Other columns, such as timestamps, are ignored; only row order matters.
pub fn load_csv(path: impl AsRef<Path>, value_column: &str, frequency: usize) -> Result<TimeSeries, SeriesError> {
    let path = path.as_ref();
    let csv_err = |e: csv::Error| SeriesError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let file = std::fs::File::open(path).map_err(|source| SeriesError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = reader.headers().map_err(csv_err)?.clone();
    let column = headers
        .iter()
        .position(|h| h.trim() == value_column)
        .ok_or_else(|| SeriesError::MissingColumn(value_column.to_string()))?;

    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = i + 1;
        let cell = record.get(column).unwrap_or("").trim();
        let value: f64 = cell.parse().map_err(|_| SeriesError::Unparseable {
            row,
            cell: cell.to_string(),
        })?;
        if !value.is_finite() {
            return Err(SeriesError::Unparseable {
                row,
                cell: cell.to_string(),
            });
        }
        values.push(value);
    }
    match values.len() {
        0 => return Err(SeriesError::EmptyColumn),
        1 => return Err(SeriesError::TooFewRows(1)),
        _ => {}
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| value_column.to_string());
    TimeSeries::with_origin(name, frequency, values, Origin::Csv(path.to_path_buf()))
}

/// Writes a series as a two-column CSV (`index,<value_column>`).
pub fn write_csv(series: &TimeSeries, path: impl AsRef<Path>, value_column: &str) -> Result<(), SeriesError> {
    let path = path.as_ref();
    let csv_err = |e: csv::Error| SeriesError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut writer = csv::Writer::from_path(path).map_err(csv_err)?;
    writer.write_record(["index", value_column]).map_err(csv_err)?;
    for (i, v) in series.values().iter().enumerate() {
        // `{:?}` prints the shortest representation that round-trips exactly.
        writer
            .write_record([i.to_string(), format!("{v:?}")])
            .map_err(csv_err)?;
    }
    writer.flush().map_err(|source| SeriesError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Training prefix and held-out suffix of one series.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: TimeSeries,
    pub test: TimeSeries,
    pub horizon: usize,
}

/// Holds out the last `horizon` observations as the test set.
pub fn train_test_split(series: &TimeSeries, horizon: usize) -> Result<SplitPair, SeriesError> {
    let n = series.len();
    if horizon == 0 || horizon >= n {
        return Err(SeriesError::InvalidHorizon { horizon, len: n });
    }
    let (train, test) = series.values().split_at(n - horizon);
    Ok(SplitPair {
        train: series.derive(train.to_vec())?,
        test: series.derive(test.to_vec())?,
        horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_named_column_in_row_order() {
        let f = write_tmp("week,passengers\n2021-01-03,10\n2021-01-10,11\n2021-01-17,12\n");
        let s = load_csv(f.path(), "passengers", 52).unwrap();
        assert_eq!(s.values(), &[10.0, 11.0, 12.0]);
        assert_eq!(s.frequency(), 52);
        assert!(matches!(s.origin(), Origin::Csv(_)));
    }

    #[test]
    fn reports_bad_row() {
        let f = write_tmp("passengers\n10\nabc\n12\n");
        match load_csv(f.path(), "passengers", 52) {
            Err(SeriesError::Unparseable { row, .. }) => assert_eq!(row, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_only_is_empty_column() {
        let f = write_tmp("passengers\n");
        let err = load_csv(f.path(), "passengers", 52).unwrap_err();
        assert!(matches!(err, SeriesError::EmptyColumn));
        assert_eq!(err.to_string(), "empty column");
    }

    #[test]
    fn missing_file_and_column() {
        assert!(matches!(
            load_csv("/nonexistent/file.csv", "x", 1),
            Err(SeriesError::Io { .. })
        ));
        let f = write_tmp("a\n1\n2\n");
        assert!(matches!(load_csv(f.path(), "b", 1), Err(SeriesError::MissingColumn(_))));
    }

    #[test]
    fn rejects_invalid_values() {
        assert!(TimeSeries::new("x", 1, vec![]).is_err());
        assert!(TimeSeries::new("x", 0, vec![1.0]).is_err());
        assert!(TimeSeries::new("x", 1, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn split_lengths() {
        let s = TimeSeries::new("x", 52, (0..200).map(f64::from).collect()).unwrap();
        let sp = train_test_split(&s, 12).unwrap();
        assert_eq!(sp.train.len(), 188);
        assert_eq!(sp.test.len(), 12);
        assert!(train_test_split(&s, 200).is_err());
        assert!(train_test_split(&s, 0).is_err());
    }

    #[test]
    fn json_shape() {
        let s = TimeSeries::new("demo", 4, vec![1.0, 2.5]).unwrap();
        let json = s.to_json().unwrap();
        assert_eq!(json, r#"{"name":"demo","frequency":4,"values":[1.0,2.5]}"#);
        assert_eq!(TimeSeries::from_json(&json).unwrap(), s);
        assert!(TimeSeries::from_json(r#"{"name":"x","frequency":0,"values":[1.0]}"#).is_err());
    }

    proptest! {
        #[test]
        fn split_then_concat_is_identity(values in prop::collection::vec(-1e6f64..1e6, 2..80), h in 1usize..80) {
            prop_assume!(h < values.len());
            let s = TimeSeries::new("p", 1, values.clone()).unwrap();
            let sp = train_test_split(&s, h).unwrap();
            prop_assert_eq!(sp.test.len(), h);
            let joined: Vec<f64> = sp.train.values().iter().chain(sp.test.values()).copied().collect();
            prop_assert_eq!(joined, values);
        }

        #[test]
        fn csv_round_trip(values in prop::collection::vec(-1e9f64..1e9, 2..40)) {
            let s = TimeSeries::new("rt", 7, values).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("rt.csv");
            write_csv(&s, &path, "y").unwrap();
            let back = load_csv(&path, "y", 7).unwrap();
            for (a, b) in back.values().iter().zip(s.values()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}
