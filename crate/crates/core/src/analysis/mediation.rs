//! Does a transform help through the stationarity it produces, or directly?
//! T is 1 for a transformed cell, S the three consensus ratios, Y the sMAPE.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::compare::NONE_ID;
use super::{ols_named, AnalysisError, OlsFit};
use crate::harness::{ExperimentRecord, Status};
use crate::models::Category;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediationRow {
    pub treated: f64,
    pub trend: f64,
    pub variance: f64,
    pub seasonal: f64,
    pub smape: f64,
    pub category: Category,
}

/// Ok records that carry both a stationarity report and an sMAPE.
pub fn mediation_rows(records: &[ExperimentRecord]) -> Vec<MediationRow> {
    records
        .iter()
        .filter(|r| r.status == Status::Ok)
        .filter_map(|r| {
            let s = r.stationarity.as_ref()?;
            Some(MediationRow {
                treated: f64::from(u8::from(r.transform_id != NONE_ID)),
                trend: s.r_trend(),
                variance: s.r_var(),
                seasonal: s.r_seasonal(),
                smape: r.smape()?,
                category: r.category,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MediationOptions {
    /// Adds partial and traditionally_required dummies (not_required is the reference).
    pub category_controls: bool,
    /// Adds ratio x traditionally_required interactions; implies the dummies.
    pub interactions: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediationResult {
    pub n: usize,
    pub path_a_trend: OlsFit,
    pub path_a_variance: OlsFit,
    pub path_a_seasonal: OlsFit,
    pub path_b: OlsFit,
    pub path_c: OlsFit,
    pub extended: Option<OlsFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub path: String,
    pub relationship: String,
    pub coefficient: f64,
    pub std_error: f64,
    pub p_value: f64,
}

fn fit(columns: &[(&str, Vec<f64>)], y: &[f64]) -> Result<OlsFit, AnalysisError> {
    let n = y.len();
    let mut names = vec!["const".to_string()];
    let mut m = DMatrix::from_element(n, columns.len() + 1, 1.0);
    for (j, (name, col)) in columns.iter().enumerate() {
        names.push(name.to_string());
        m.set_column(j + 1, &nalgebra::DVector::from_column_slice(col));
    }
    ols_named(&m, y, names)
}

fn varies(x: &[f64]) -> bool {
    x.iter().any(|v| *v != x[0])
}

pub fn mediate(rows: &[MediationRow], options: MediationOptions) -> Result<MediationResult, AnalysisError> {
    if rows.is_empty() {
        return Err(AnalysisError::NoRecords);
    }
    let t = col_of(rows, |r| r.treated);
    let trend = col_of(rows, |r| r.trend);
    let variance = col_of(rows, |r| r.variance);
    let seasonal = col_of(rows, |r| r.seasonal);
    let y = col_of(rows, |r| r.smape);
    for (name, x) in [("treatment", &t), ("r_trend", &trend), ("r_var", &variance), ("r_seasonal", &seasonal)] {
        if !varies(x) {
            return Err(AnalysisError::InsufficientVariation(name.to_string()));
        }
    }

    let path_a_trend = fit(&[("T", t.clone())], &trend)?;
    let path_a_variance = fit(&[("T", t.clone())], &variance)?;
    let path_a_seasonal = fit(&[("T", t.clone())], &seasonal)?;
    let mut b_cols = vec![
        ("r_trend", trend.clone()),
        ("r_var", variance.clone()),
        ("r_seasonal", seasonal.clone()),
        ("T", t.clone()),
    ];
    let path_b = fit(&b_cols, &y)?;
    let path_c = fit(&[("T", t)], &y)?;

    let extended = if options.category_controls || options.interactions {
        let dummy = |c: Category| col_of(rows, |r| f64::from(u8::from(r.category == c)));
        let trad = dummy(Category::TraditionallyRequired);
        b_cols.push(("partial", dummy(Category::Partial)));
        b_cols.push(("traditionally_required", trad.clone()));
        if options.interactions {
            let times = |x: &[f64]| x.iter().zip(&trad).map(|(a, b)| a * b).collect::<Vec<f64>>();
            b_cols.push(("r_trend:traditionally_required", times(&trend)));
            b_cols.push(("r_var:traditionally_required", times(&variance)));
            b_cols.push(("r_seasonal:traditionally_required", times(&seasonal)));
        }
        Some(fit(&b_cols, &y)?)
    } else {
        None
    };

    Ok(MediationResult {
        n: rows.len(),
        path_a_trend,
        path_a_variance,
        path_a_seasonal,
        path_b,
        path_c,
        extended,
    })
}

fn col_of(rows: &[MediationRow], f: impl Fn(&MediationRow) -> f64) -> Vec<f64> {
    rows.iter().map(f).collect()
}

impl MediationResult {
    /// The path table: A per ratio, B per ratio and T, C for T.
    pub fn paths(&self) -> Vec<PathRow> {
        let row = |path: &str, relationship: &str, fit: &OlsFit, name: &str| {
            let i = fit.index_of(name).expect("regressor present");
            PathRow {
                path: path.into(),
                relationship: relationship.into(),
                coefficient: fit.coefficients[i],
                std_error: fit.standard_errors[i],
                p_value: fit.p_values[i],
            }
        };
        vec![
            row("a", "T -> r_trend", &self.path_a_trend, "T"),
            row("a", "T -> r_var", &self.path_a_variance, "T"),
            row("a", "T -> r_seasonal", &self.path_a_seasonal, "T"),
            row("b", "r_trend -> sMAPE", &self.path_b, "r_trend"),
            row("b", "r_var -> sMAPE", &self.path_b, "r_var"),
            row("b", "r_seasonal -> sMAPE", &self.path_b, "r_seasonal"),
            row("b", "T -> sMAPE given S", &self.path_b, "T"),
            row("c", "T -> sMAPE", &self.path_c, "T"),
        ]
    }
}
