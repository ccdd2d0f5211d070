//! Descriptive tables over the records, and minimal SVG renderings of them.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::compare::{ordered_transforms, NONE_ID};
use crate::harness::{ExperimentRecord, Status};
use crate::models::{Category, Family};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestRow {
    pub dataset_id: String,
    pub best_transform: String,
    pub best_smape: f64,
    pub none_smape: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    pub transform_id: String,
    pub total: usize,
    pub ok: usize,
    pub transform_failed: usize,
    pub fit_failed: usize,
    pub inverse_failed: usize,
}

/// Mean sMAPE over ok records, one cell per (row label, transform).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub title: String,
    pub row_label: String,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub best: Vec<BestRow>,
    /// Dataset x transform, over all families and then per category.
    pub heatmaps: Vec<Grid>,
    pub by_model: Grid,
    pub by_horizon: Grid,
    pub failures: Vec<FailureRow>,
}

fn ok_smape(r: &ExperimentRecord) -> Option<f64> {
    (r.status == Status::Ok).then(|| r.smape()).flatten()
}

/// Mean sMAPE grouped by a row label and transform.
pub fn grid<'a>(
    title: &str,
    row_label: &str,
    records: impl IntoIterator<Item = &'a ExperimentRecord>,
    label: impl Fn(&ExperimentRecord) -> String,
    row_order: impl Fn(&str) -> (usize, String),
) -> Grid {
    let mut sums: BTreeMap<(String, String), (f64, usize)> = BTreeMap::new();
    let mut transforms = Vec::new();
    let mut rows = Vec::new();
    for r in records {
        transforms.push(r.transform_id.clone());
        rows.push(label(r));
        if let Some(s) = ok_smape(r) {
            let e = sums.entry((label(r), r.transform_id.clone())).or_default();
            e.0 += s;
            e.1 += 1;
        }
    }
    let cols = ordered_transforms(&transforms);
    rows.sort_by_key(|r| row_order(r));
    rows.dedup();
    let values = rows
        .iter()
        .map(|row| {
            cols.iter()
                .map(|c| sums.get(&(row.clone(), c.clone())).map(|(s, n)| s / *n as f64))
                .collect()
        })
        .collect();
    Grid {
        title: title.into(),
        row_label: row_label.into(),
        rows,
        cols,
        values,
    }
}

fn dataset_order(id: &str) -> (usize, String) {
    let pos = crate::synthgen::STANDARD_IDS.iter().position(|s| *s == id);
    (pos.unwrap_or(usize::MAX), id.to_string())
}

pub fn summarize(records: &[ExperimentRecord]) -> Summary {
    let all = grid("all models", "dataset_id", records, |r| r.dataset_id.clone(), dataset_order);
    let mut heatmaps = vec![all.clone()];
    for c in [Category::TraditionallyRequired, Category::Partial, Category::NotRequired] {
        heatmaps.push(grid(
            c.id(),
            "dataset_id",
            records.iter().filter(|r| r.category == c),
            |r| r.dataset_id.clone(),
            dataset_order,
        ));
    }
    let best = all
        .rows
        .iter()
        .zip(&all.values)
        .filter_map(|(dataset, row)| {
            let none = all.cols.iter().position(|c| c == NONE_ID).and_then(|i| row[i]);
            let (i, v) = row
                .iter()
                .enumerate()
                .filter_map(|(i, v)| v.map(|v| (i, v)))
                .min_by(|a, b| a.1.total_cmp(&b.1))?;
            Some(BestRow {
                dataset_id: dataset.clone(),
                best_transform: all.cols[i].clone(),
                best_smape: v,
                none_smape: none,
            })
        })
        .collect();
    let family_order = |id: &str| {
        let pos = Family::ALL.iter().position(|f| f.id() == id);
        (pos.unwrap_or(usize::MAX), id.to_string())
    };
    let by_model = grid("by model", "model_family", records, |r| r.model_family.id().to_string(), family_order);
    let by_horizon = grid(
        "by horizon",
        "horizon",
        records,
        |r| r.horizon.to_string(),
        |h: &str| (h.parse().unwrap_or(usize::MAX), h.to_string()),
    );

    let mut fails: BTreeMap<String, FailureRow> = BTreeMap::new();
    for r in records {
        let row = fails.entry(r.transform_id.clone()).or_insert_with(|| FailureRow {
            transform_id: r.transform_id.clone(),
            total: 0,
            ok: 0,
            transform_failed: 0,
            fit_failed: 0,
            inverse_failed: 0,
        });
        row.total += 1;
        match r.status {
            Status::Ok => row.ok += 1,
            Status::TransformFailed => row.transform_failed += 1,
            Status::FitFailed => row.fit_failed += 1,
            Status::InverseFailed => row.inverse_failed += 1,
        }
    }
    let failures = ordered_transforms(fails.keys())
        .into_iter()
        .filter_map(|id| fails.remove(&id))
        .collect();

    Summary {
        best,
        heatmaps,
        by_model,
        by_horizon,
        failures,
    }
}

impl Grid {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.row_label, self.cols.join(","));
        for (row, vals) in self.rows.iter().zip(&self.values) {
            out.push_str(row);
            for v in vals {
                out.push(',');
                if let Some(v) = v {
                    let _ = write!(out, "{v:.6}");
                }
            }
            out.push('\n');
        }
        out
    }

    /// Heatmap with a white-to-red scale; empty cells are grey.
    pub fn heatmap_svg(&self) -> String {
        let (cell_w, cell_h, left, top) = (44.0, 22.0, 180.0, 190.0);
        let width = left + cell_w * self.cols.len() as f64 + 20.0;
        let height = top + cell_h * self.rows.len() as f64 + 20.0;
        let finite: Vec<f64> = self.values.iter().flatten().flatten().copied().collect();
        let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut s = svg_open(width, height);
        let _ = writeln!(s, r#"<text x="10" y="20" font-size="14">{}</text>"#, escape(&self.title));
        for (j, c) in self.cols.iter().enumerate() {
            let x = left + cell_w * (j as f64 + 0.5);
            let _ = writeln!(
                s,
                r#"<text x="{x:.1}" y="{:.1}" font-size="10" transform="rotate(-60 {x:.1} {:.1})">{}</text>"#,
                top - 6.0,
                top - 6.0,
                escape(c)
            );
        }
        for (i, (row, vals)) in self.rows.iter().zip(&self.values).enumerate() {
            let y = top + cell_h * i as f64;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"#,
                left - 6.0,
                y + 15.0,
                escape(row)
            );
            for (j, v) in vals.iter().enumerate() {
                let x = left + cell_w * j as f64;
                let fill = match v {
                    Some(v) => {
                        let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
                        let gb = (255.0 * (1.0 - t)).round() as u8;
                        format!("rgb(255,{gb},{gb})")
                    }
                    None => "#ccc".into(),
                };
                let _ = writeln!(
                    s,
                    r##"<rect x="{x:.1}" y="{y:.1}" width="{cell_w}" height="{cell_h}" fill="{fill}" stroke="#fff"/>"##
                );
                if let Some(v) = v {
                    let _ = writeln!(
                        s,
                        r#"<text x="{:.1}" y="{:.1}" font-size="9" text-anchor="middle">{v:.3}</text>"#,
                        x + cell_w / 2.0,
                        y + 15.0
                    );
                }
            }
        }
        s.push_str("</svg>\n");
        s
    }

    /// One polyline per transform across the rows, which are read as the x axis.
    pub fn line_svg(&self) -> String {
        let (w, h, pad) = (640.0, 360.0, 50.0);
        let finite: Vec<f64> = self.values.iter().flatten().flatten().copied().collect();
        let hi = finite.iter().copied().fold(0.0, f64::max).max(1e-9);
        let n = self.rows.len().max(2) - 1;
        let x_at = |i: usize| pad + (w - 2.0 * pad - 150.0) * i as f64 / n as f64;
        let y_at = |v: f64| h - pad - (h - 2.0 * pad) * v / hi;
        let mut s = svg_open(w, h);
        let _ = writeln!(s, r#"<text x="10" y="20" font-size="14">{}</text>"#, escape(&self.title));
        let _ = writeln!(
            s,
            r##"<line x1="{pad}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#000"/>"##,
            h - pad,
            w - pad - 150.0,
            h - pad
        );
        let _ = writeln!(s, r##"<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{:.1}" stroke="#000"/>"##, h - pad);
        let _ = writeln!(s, r#"<text x="5" y="{pad}" font-size="10">{hi:.3}</text>"#);
        for (i, row) in self.rows.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{}</text>"#,
                x_at(i),
                h - pad + 14.0,
                escape(row)
            );
        }
        for (j, c) in self.cols.iter().enumerate() {
            let hue = 360.0 * j as f64 / self.cols.len().max(1) as f64;
            let points: Vec<String> = self
                .values
                .iter()
                .enumerate()
                .filter_map(|(i, vals)| vals[j].map(|v| format!("{:.1},{:.1}", x_at(i), y_at(v))))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="hsl({hue:.0},70%,45%)" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" font-size="10" fill="hsl({hue:.0},70%,45%)">{}</text>"#,
                w - pad - 140.0,
                pad + 12.0 * j as f64,
                escape(c)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn svg_open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" font-family=\"sans-serif\">\n"
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
