//! Stationarity test battery and the two-pass consensus ratios.
//!
//! Each series gets three ratios in `[0, 1]`: the share of included tests
//! that call it stationary along the trend, variance and seasonal dimension.
//! Zivot-Andrews is always reported but never counted. ARCH joins the variance
//! vote only when the first-pass trend and seasonal ratios are at least
//! [`GATE_THRESHOLD`]; the ACF spike joins the seasonal vote only when the
//! first-pass trend and variance ratios are.

pub mod seasonal;
pub mod unit_root;
pub mod variance;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::TimeSeries;

/// Shortest series any test accepts.
pub const MIN_LENGTH: usize = 20;
/// First-pass ratio at which a dimension counts as stationary for gating.
pub const GATE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StationarityError {
    #[error("series too short: need {needed}, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("constant series")]
    Constant,
    #[error("singular regression in {0}")]
    Singular(&'static str),
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("dimension {0} has no usable tests")]
    NoUsableTests(Dimension),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Trend,
    Variance,
    Seasonal,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Trend => "trend",
            Dimension::Variance => "variance",
            Dimension::Seasonal => "seasonal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestId {
    #[serde(rename = "ADF")]
    Adf,
    #[serde(rename = "PP")]
    Pp,
    #[serde(rename = "KPSS")]
    Kpss,
    #[serde(rename = "ZA")]
    Za,
    #[serde(rename = "VR")]
    Vr,
    #[serde(rename = "BP")]
    Bp,
    White,
    #[serde(rename = "GQ")]
    Gq,
    #[serde(rename = "ARCH")]
    Arch,
    #[serde(rename = "STL")]
    Stl,
    #[serde(rename = "ACFPACF")]
    AcfPacf,
}

impl TestId {
    pub const ALL: [TestId; 11] = [
        TestId::Adf,
        TestId::Pp,
        TestId::Kpss,
        TestId::Za,
        TestId::Vr,
        TestId::Bp,
        TestId::White,
        TestId::Gq,
        TestId::Arch,
        TestId::Stl,
        TestId::AcfPacf,
    ];

    pub fn dimension(self) -> Dimension {
        match self {
            TestId::Adf | TestId::Pp | TestId::Kpss | TestId::Za | TestId::Vr => Dimension::Trend,
            TestId::Bp | TestId::White | TestId::Gq | TestId::Arch => Dimension::Variance,
            TestId::Stl | TestId::AcfPacf => Dimension::Seasonal,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TestId::Adf => "ADF",
            TestId::Pp => "PP",
            TestId::Kpss => "KPSS",
            TestId::Za => "ZA",
            TestId::Vr => "VR",
            TestId::Bp => "BP",
            TestId::White => "White",
            TestId::Gq => "GQ",
            TestId::Arch => "ARCH",
            TestId::Stl => "STL",
            TestId::AcfPacf => "ACFPACF",
        }
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Raw verdict of a single test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOutcome {
    pub statistic: f64,
    /// `None` for tests judged against a critical value only.
    pub p_value: Option<f64>,
    pub critical_value: Option<f64>,
    pub stationary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub id: TestId,
    pub statistic: Option<f64>,
    #[serde(rename = "p")]
    pub p_value: Option<f64>,
    pub critical_value: Option<f64>,
    pub stationary: bool,
    pub included: bool,
    pub reason: Option<String>,
}

impl TestResult {
    fn from_outcome(id: TestId, outcome: Result<TestOutcome, StationarityError>) -> Self {
        match outcome {
            Ok(o) => TestResult {
                id,
                statistic: Some(o.statistic),
                p_value: o.p_value,
                critical_value: o.critical_value,
                stationary: o.stationary,
                included: false,
                reason: None,
            },
            Err(e) => TestResult {
                id,
                statistic: None,
                p_value: None,
                critical_value: None,
                stationary: false,
                included: false,
                reason: Some(format!("error: {e}")),
            },
        }
    }

    fn usable(&self) -> bool {
        self.statistic.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub trend: f64,
    pub variance: f64,
    pub seasonal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub ratios: Ratios,
    pub tests: Vec<TestResult>,
}

impl StationarityReport {
    pub fn r_trend(&self) -> f64 {
        self.ratios.trend
    }

    pub fn r_var(&self) -> f64 {
        self.ratios.variance
    }

    pub fn r_seasonal(&self) -> f64 {
        self.ratios.seasonal
    }

    pub fn test(&self, id: TestId) -> Option<&TestResult> {
        self.tests.iter().find(|t| t.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn check_input(y: &[f64]) -> Result<(), StationarityError> {
    if y.len() < MIN_LENGTH {
        return Err(StationarityError::TooShort {
            needed: MIN_LENGTH,
            got: y.len(),
        });
    }
    let first = y[0];
    if y.iter().all(|v| *v == first) {
        return Err(StationarityError::Constant);
    }
    Ok(())
}

/// Runs one test on raw values; `period` is only used by the seasonal tests.
pub fn run_test_values(y: &[f64], period: usize, id: TestId) -> Result<TestOutcome, StationarityError> {
    check_input(y)?;
    match id {
        TestId::Adf => unit_root::adf(y),
        TestId::Pp => unit_root::phillips_perron(y),
        TestId::Kpss => unit_root::kpss(y),
        TestId::Za => unit_root::zivot_andrews(y),
        TestId::Vr => unit_root::variance_ratio(y),
        TestId::Bp => variance::breusch_pagan(y),
        TestId::White => variance::white(y),
        TestId::Gq => variance::goldfeld_quandt(y),
        TestId::Arch => variance::arch_lm(y),
        TestId::Stl => seasonal::stl(y, period),
        TestId::AcfPacf => seasonal::acf_periodicity(y, period),
    }
}

/// Runs one test using the series frequency as the seasonal period.
pub fn run_test(series: &TimeSeries, id: TestId) -> Result<TestResult, StationarityError> {
    let outcome = run_test_values(series.values(), series.frequency(), id)?;
    Ok(TestResult::from_outcome(id, Ok(outcome)))
}

/// Equal-weight share of included tests in `dim` that indicate stationarity.
pub fn consensus_ratio(tests: &[TestResult], dim: Dimension) -> Option<f64> {
    let included: Vec<&TestResult> = tests.iter().filter(|t| t.included && t.id.dimension() == dim).collect();
    if included.is_empty() {
        return None;
    }
    let yes = included.iter().filter(|t| t.stationary).count();
    Some(yes as f64 / included.len() as f64)
}

fn ratio_or_err(tests: &[TestResult], dim: Dimension) -> Result<f64, StationarityError> {
    consensus_ratio(tests, dim).ok_or(StationarityError::NoUsableTests(dim))
}

/// Two-pass consensus over all eleven tests.
pub fn consensus_values(y: &[f64], period: usize) -> Result<StationarityReport, StationarityError> {
    let mut tests: Vec<TestResult> = TestId::ALL
        .iter()
        .map(|&id| TestResult::from_outcome(id, run_test_values(y, period, id)))
        .collect();

    const FIRST_PASS: [TestId; 7] = [
        TestId::Adf,
        TestId::Pp,
        TestId::Kpss,
        TestId::Vr,
        TestId::Bp,
        TestId::White,
        TestId::Gq,
    ];
    for t in tests.iter_mut() {
        if FIRST_PASS.contains(&t.id) || t.id == TestId::Stl {
            t.included = t.usable();
        } else if t.id == TestId::Za && t.usable() {
            t.reason = Some("never counted toward the trend ratio".into());
        }
    }
    let trend = ratio_or_err(&tests, Dimension::Trend)?;
    let var1 = ratio_or_err(&tests, Dimension::Variance)?;
    let seas1 = consensus_ratio(&tests, Dimension::Seasonal);

    let trend_ok = trend >= GATE_THRESHOLD;
    // An unavailable STL vote does not block ARCH.
    let arch_gate = trend_ok && seas1.is_none_or(|s| s >= GATE_THRESHOLD);
    let acf_gate = trend_ok && var1 >= GATE_THRESHOLD;
    for t in tests.iter_mut() {
        let gate = match t.id {
            TestId::Arch => Some((arch_gate, "trend or seasonal first-pass ratio below threshold")),
            TestId::AcfPacf => Some((acf_gate, "trend or variance first-pass ratio below threshold")),
            _ => None,
        };
        if let Some((open, why)) = gate {
            if !t.usable() {
                continue;
            }
            if open {
                t.included = true;
            } else {
                t.reason = Some(why.into());
            }
        }
    }
    Ok(StationarityReport {
        ratios: Ratios {
            trend,
            variance: ratio_or_err(&tests, Dimension::Variance)?,
            seasonal: ratio_or_err(&tests, Dimension::Seasonal)?,
        },
        tests,
    })
}

pub fn consensus(series: &TimeSeries) -> Result<StationarityReport, StationarityError> {
    consensus_values(series.values(), series.frequency())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(id: TestId, stationary: bool, included: bool) -> TestResult {
        TestResult {
            id,
            statistic: Some(0.0),
            p_value: None,
            critical_value: None,
            stationary,
            included,
            reason: None,
        }
    }

    #[test]
    fn ratio_counts_only_included() {
        let tests = vec![
            result(TestId::Adf, true, true),
            result(TestId::Pp, false, true),
            result(TestId::Za, false, false),
            result(TestId::Kpss, true, true),
            result(TestId::Vr, true, true),
        ];
        assert_eq!(consensus_ratio(&tests, Dimension::Trend), Some(0.75));
        assert_eq!(consensus_ratio(&tests, Dimension::Variance), None);
    }

    #[test]
    fn unanimous_is_one() {
        let tests: Vec<TestResult> = [TestId::Bp, TestId::White, TestId::Gq]
            .iter()
            .map(|&id| result(id, true, true))
            .collect();
        assert_eq!(consensus_ratio(&tests, Dimension::Variance), Some(1.0));
    }

    #[test]
    fn short_and_constant_inputs_rejected() {
        assert!(matches!(
            run_test_values(&[1.0; 10], 4, TestId::Adf),
            Err(StationarityError::TooShort { .. })
        ));
        assert_eq!(run_test_values(&[2.0; 40], 4, TestId::Kpss), Err(StationarityError::Constant));
    }

    #[test]
    fn json_shape() {
        let report = StationarityReport {
            ratios: Ratios {
                trend: 1.0,
                variance: 0.5,
                seasonal: 1.0,
            },
            tests: vec![result(TestId::AcfPacf, true, false)],
        };
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(v["ratios"]["variance"], 0.5);
        assert_eq!(v["tests"][0]["id"], "ACFPACF");
        assert!(v["tests"][0].get("p").is_some());
    }
}
