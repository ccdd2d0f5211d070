use rand::Rng;
use rand_distr::{Distribution, Normal};

use statlab::analysis::{
    analyze, classify_match, compare_transforms, matched_summary, mediate, summarize, AnalysisError, AnalysisOptions,
    MatchClass, MediationOptions, MediationRow, SMAPE_UNFRIENDLY,
};
use statlab::harness::{ExperimentRecord, Status};
use statlab::metrics::MetricSet;
use statlab::models::{Category, Family};
use statlab::rng::stream;
use statlab::stationarity::{Ratios, StationarityReport};
use statlab::synthgen::STANDARD_IDS;
use statlab::transforms::PIPELINE_IDS;

fn record(dataset: &str, transform: &str, family: Family, horizon: usize, smape: Option<f64>) -> ExperimentRecord {
    ExperimentRecord {
        dataset_id: dataset.into(),
        transform_id: transform.into(),
        model_family: family,
        category: family.category(),
        horizon,
        seed: 0,
        status: if smape.is_some() { Status::Ok } else { Status::InverseFailed },
        error: None,
        metrics: smape.map(|s| MetricSet {
            smape: s,
            rmse: s,
            mae: s,
            mase: None,
        }),
        stationarity: smape.map(|s| StationarityReport {
            ratios: Ratios {
                trend: if transform == "none" { 0.2 } else { 0.8 } + (13.0 * s).cos() / 10.0,
                variance: 0.5 + (37.0 * s).sin() / 4.0,
                seasonal: 0.9 - s * s,
            },
            tests: Vec::new(),
        }),
        stationarity_error: None,
        tuned_spec: None,
        wall_time: 0.0,
    }
}

#[test]
fn all_improving_pairs_give_exact_p() {
    let mut records = Vec::new();
    for (i, ds) in ["linear_trend", "seasonal", "random_walk"].iter().enumerate() {
        for h in [4, 12] {
            let base = 0.2 + 0.01 * (i * 2 + h) as f64;
            records.push(record(ds, "none", Family::AR, h, Some(base)));
            records.push(record(ds, "difference", Family::AR, h, Some(base - 0.05 - 0.001 * h as f64)));
            records.push(record(ds, "log", Family::AR, h, None));
        }
    }
    let rows = compare_transforms(&records, &[]).unwrap();
    assert_eq!(rows.len(), 2);
    let diff = &rows[0];
    assert_eq!(diff.transform_id, "difference");
    assert_eq!(diff.n_pairs, 6);
    // six negative differences: the only more extreme outcome is all positive
    let oracle = 2.0 / 64.0;
    assert!((diff.p_raw.unwrap() - oracle).abs() < 1e-12);
    assert_eq!(diff.p_bh, diff.p_raw);
    assert!(diff.significant);
    assert!(diff.mean_smape.unwrap() < diff.none_smape.unwrap());
    let log = &rows[1];
    assert!(log.insufficient && log.p_raw.is_none() && !log.significant);

    let kept = compare_transforms(&records, &["seasonal", "random_walk"]).unwrap();
    assert_eq!(kept[0].n_pairs, 2);
}

#[test]
fn comparison_needs_none() {
    let records = vec![record("seasonal", "log", Family::AR, 4, Some(0.1))];
    assert!(matches!(compare_transforms(&records, &[]), Err(AnalysisError::MissingBaseline)));
}

#[test]
fn classification_is_total() {
    for t in PIPELINE_IDS {
        for d in STANDARD_IDS {
            let class = classify_match(t, d).unwrap();
            assert_eq!(class == MatchClass::Excluded, t == "none", "{t} on {d}");
        }
    }
    assert_eq!(classify_match("difference", "linear_trend").unwrap(), MatchClass::Matched);
    assert_eq!(classify_match("log", "seasonal").unwrap(), MatchClass::Mismatched);
    assert_eq!(classify_match("log+seasonal_difference", "seasonal").unwrap(), MatchClass::Matched);
    assert_eq!(classify_match("fractional_difference", "random_walk").unwrap(), MatchClass::Matched);
    assert_eq!(classify_match("boxcox", "baseline").unwrap(), MatchClass::Mismatched);
    assert!(classify_match("difference", "airline").is_err());
    assert!(classify_match("cube_root", "seasonal").is_err());
}

#[test]
fn matched_summary_by_hand() {
    let records = vec![
        record("linear_trend", "none", Family::AR, 4, Some(0.30)),
        record("linear_trend", "difference", Family::AR, 4, Some(0.10)),
        record("linear_trend", "log", Family::AR, 4, Some(0.40)),
        record("seasonal", "none", Family::AR, 4, Some(0.20)),
        record("seasonal", "difference", Family::AR, 4, Some(0.10)),
        record("seasonal", "seasonal_difference", Family::AR, 4, Some(0.25)),
    ];
    let rows = matched_summary(&records).unwrap();
    let matched = &rows[0];
    assert_eq!(matched.match_type, MatchClass::Matched);
    assert_eq!(matched.n, 2);
    assert!((matched.mean_smape.unwrap() - 0.175).abs() < 1e-12);
    assert!((matched.mean_diff.unwrap() - (-0.075)).abs() < 1e-12);
    assert!((matched.pct_improved.unwrap() - 50.0).abs() < 1e-12);
    let mismatched = &rows[1];
    assert_eq!(mismatched.n, 2);
    assert!((mismatched.mean_diff.unwrap() - 0.0).abs() < 1e-12);
    assert!((mismatched.pct_improved.unwrap() - 50.0).abs() < 1e-12);
}

fn simulated(n: usize, seed: u64, effect: f64) -> Vec<MediationRow> {
    let mut rng = stream(seed, 0);
    let noise = Normal::new(0.0, 0.1).unwrap();
    (0..n)
        .map(|i| {
            let treated = f64::from(u8::from(i % 2 == 0));
            let trend = 0.3 + effect * treated + noise.sample(&mut rng);
            MediationRow {
                treated,
                trend,
                variance: rng.random::<f64>(),
                seasonal: rng.random::<f64>(),
                smape: 0.5 * effect.signum() * trend + 0.5 * noise.sample(&mut rng),
                category: Category::NotRequired,
            }
        })
        .collect()
}

#[test]
fn simulated_mediation_recovered() {
    let rows = simulated(600, 11, 0.4);
    let m = mediate(&rows, MediationOptions::default()).unwrap();
    assert!(m.path_a_trend.coef("T").unwrap() > 0.3 && m.path_a_trend.p("T").unwrap() < 1e-6);
    assert!(m.path_a_variance.p("T").unwrap() > 1e-3);
    let b = m.path_b.coef("r_trend").unwrap();
    assert!((b - 0.5).abs() < 0.15 && m.path_b.p("r_trend").unwrap() < 1e-6);
    // the whole effect runs through the trend ratio
    assert!(m.path_b.coef("T").unwrap().abs() < 0.08);
    let c = m.path_c.coef("T").unwrap();
    assert!((c - 0.2).abs() < 0.06 && m.path_c.p("T").unwrap() < 1e-6);
    assert_eq!(m.paths().len(), 8);
}

#[test]
fn null_path_c_rejects_at_nominal_rate() {
    let rejections = (0..200)
        .filter(|seed| {
            let rows = simulated(200, 1000 + seed, 0.0);
            let m = mediate(&rows, MediationOptions::default()).unwrap();
            m.path_c.p("T").unwrap() < 0.05
        })
        .count();
    let rate = rejections as f64 / 200.0;
    assert!((0.02..=0.09).contains(&rate), "rejection rate {rate}");
}

#[test]
fn mediation_controls_and_interactions() {
    let mut rows = simulated(300, 5, 0.4);
    for (i, r) in rows.iter_mut().enumerate() {
        r.category = [Category::NotRequired, Category::Partial, Category::TraditionallyRequired][i % 3];
    }
    let m = mediate(
        &rows,
        MediationOptions {
            category_controls: true,
            interactions: true,
        },
    )
    .unwrap();
    let e = m.extended.unwrap();
    assert_eq!(e.names.len(), 10);
    assert!(e.coef("r_var:traditionally_required").is_some());
}

#[test]
fn mediation_without_variation_is_an_error() {
    let mut rows = simulated(50, 3, 0.4);
    for r in &mut rows {
        r.treated = 1.0;
    }
    assert!(matches!(
        mediate(&rows, MediationOptions::default()),
        Err(AnalysisError::InsufficientVariation(_))
    ));
    assert!(matches!(mediate(&[], MediationOptions::default()), Err(AnalysisError::NoRecords)));
}

fn grid_records() -> Vec<ExperimentRecord> {
    let mut out = Vec::new();
    for (d, ds) in ["seasonal", "random_walk", "baseline"].iter().enumerate() {
        for (t, tr) in ["none", "difference", "log"].iter().enumerate() {
            for family in [Family::AR, Family::ETS, Family::GradientBoosting] {
                for h in [4, 12] {
                    let s = 0.1 + 0.05 * ((d + 2 * t + h) % 5) as f64 + 0.01 * family.id().len() as f64;
                    let ok = !(*ds == "baseline" && *tr == "log");
                    out.push(record(ds, tr, family, h, ok.then_some(s)));
                }
            }
        }
    }
    out
}

#[test]
fn summary_tables_agree_with_direct_means() {
    let records = grid_records();
    let s = summarize(&records);
    assert_eq!(s.heatmaps.len(), 4);
    let all = &s.heatmaps[0];
    assert_eq!(all.rows, ["baseline", "seasonal", "random_walk"]);
    assert_eq!(all.cols, ["none", "difference", "log"]);
    for (i, ds) in all.rows.iter().enumerate() {
        for (j, tr) in all.cols.iter().enumerate() {
            let v: Vec<f64> = records
                .iter()
                .filter(|r| &r.dataset_id == ds && &r.transform_id == tr)
                .filter_map(|r| r.smape())
                .collect();
            let expect = (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            match (all.values[i][j], expect) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12),
                (a, b) => assert_eq!(a, b),
            }
        }
    }
    for b in &s.best {
        let row = all.rows.iter().position(|r| r == &b.dataset_id).unwrap();
        let min = all.values[row].iter().flatten().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(b.best_smape, min);
    }
    let log = s.failures.iter().find(|f| f.transform_id == "log").unwrap();
    assert_eq!((log.total, log.ok, log.inverse_failed), (18, 12, 6));
    assert_eq!(s.by_horizon.rows, ["4", "12"]);
    assert!(s.by_horizon.line_svg().starts_with("<svg"));
    assert!(all.to_csv().starts_with("dataset_id,none,difference,log\n"));
}

#[test]
fn analysis_writes_tables_and_report() {
    let records = grid_records();
    let a = analyze(
        &records,
        AnalysisOptions {
            exclude_smape_unfriendly: true,
            ..AnalysisOptions::default()
        },
    )
    .unwrap();
    assert_eq!(a.excluded_datasets, SMAPE_UNFRIENDLY);
    assert!(a.comparison.iter().all(|r| r.n_pairs == 12));
    assert!(a.mediation.is_some(), "{:?}", a.mediation_error);
    let dir = tempfile::tempdir().unwrap();
    let written = a.write(dir.path()).unwrap();
    for name in ["transform_comparison.csv", "matched_pairs.csv", "mediation_paths.csv", "report.md", "heatmap_all_models.svg"] {
        assert!(written.iter().any(|p| p.ends_with(name)), "{name}");
    }
    let md = std::fs::read_to_string(dir.path().join("report.md")).unwrap();
    assert!(md.contains("## Transforms against none") && md.contains("| difference | 12 |"));
    assert!(matches!(analyze(&[], AnalysisOptions::default()), Err(AnalysisError::NoRecords)));
}
