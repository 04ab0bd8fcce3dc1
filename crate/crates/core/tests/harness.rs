use std::sync::Arc;

use seqfed::harness::{
    build_problem, csv_string, fstar_oracle, grid_search, run_experiment, ExperimentConfig,
    HarnessError, CSV_HEADER,
};
use seqfed::{ClientObjective, LogisticClient, Method};

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text).unwrap()
}

#[test]
fn group1_pfl_grid_selection() {
    let cfg = config(
        "problem = group 1\nmethods = pfl\nrounds = 50\nlocal_steps = 10\nlr_grid = 0.2, 0.02\nseeds = 0..3\ninit = 1\n",
    );
    let out = grid_search(&cfg).unwrap();
    assert_eq!(out.best_lr(Method::Pfl), Some(0.2));
}

#[test]
fn synthetic_full_batch_gradient_at_zero() {
    let data = Arc::new(seqfed::data::generate_synthetic(100, 5, 0));
    let client: ClientObjective =
        LogisticClient::new(Arc::clone(&data), (0..100).collect(), 0.0, 100).into();
    let g = client.gradient(&[0.0; 5]).unwrap();
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();

    // at x = 0 every sigmoid is ½, so ∇ = (1/n) Σ (½ − b)·a
    let mut direct = [0.0; 5];
    for s in &data.samples {
        for &(i, v) in &s.features {
            direct[i as usize - 1] += (0.5 - f64::from(s.label)) * v / 100.0;
        }
    }
    for (a, b) in g.iter().zip(direct) {
        assert!((a - b).abs() <= 1e-15);
    }
    assert!((norm - 1.158470292005966).abs() <= 1e-12, "{norm}");
}

#[test]
fn csv_matches_the_golden_file() {
    let cfg = config(
        "problem = group 2\nmethods = sfl, pfl\nrounds = 4\nlocal_steps = 2\nlr_grid = 0.1\nseeds = 0..2\ninit = 1\nsigma = 0.5\n",
    );
    let csv = csv_string(&run_experiment(&cfg).unwrap().rows);
    assert!(csv.starts_with(&CSV_HEADER.join(",")));
    assert_eq!(csv, include_str!("golden/group2_small.csv"));
}

#[test]
fn gaps_respect_the_oracle() {
    for text in [
        "problem = group 8\nrounds = 30\nlocal_steps = 5\nlr_grid = 0.01, 0.1\nseeds = 0..3\nsigma = 1\n",
        "problem = hard heterogeneity mid-lr\nclients = 4\nrounds = 10\nlocal_steps = 3\nlr_grid = 0.05\nseeds = 0..2\nzeta = 2\n",
        "problem = synthetic 200 4\nclients = 10\nlabels_per_client = 2\nrounds = 15\nlocal_steps = 3\nlr_grid = 0.1, 0.3\nseeds = 0..2\nreg = 0.01\n",
    ] {
        let r = run_experiment(&config(text)).unwrap();
        assert!(!r.rows.is_empty());
        for row in &r.rows {
            assert!(row.gap >= -row.gap_tol, "{}: gap {} below −{}", r.task, row.gap, row.gap_tol);
        }
    }
}

#[test]
fn group3_sfl_beats_pfl_at_half_the_step() {
    let cfg = config(
        "problem = group 3\nmethods = sfl, pfl\nrounds = 100\nlocal_steps = 10\nlr_grid = 0.01\nseeds = 0..10\ninit = 0\n",
    );
    assert_eq!(cfg.sfl_lr_scale, 0.5);
    let r = run_experiment(&cfg).unwrap();
    let sfl = r.cell(Method::Sfl, 0.01).unwrap();
    let pfl = r.cell(Method::Pfl, 0.01).unwrap();
    assert_eq!(sfl.lr, 0.005);
    assert_eq!(sfl.seeds, 10);
    assert!(
        sfl.final_gap_mean < pfl.final_gap_mean,
        "{} vs {}",
        sfl.final_gap_mean,
        pfl.final_gap_mean
    );
}

#[test]
fn quadratic_optima_are_exact() {
    let cfg = config("problem = group 2\nrounds = 1\n");
    let problem = build_problem(&cfg.problem, &cfg.training).unwrap();
    let f = fstar_oracle(&problem.clients).unwrap();
    assert!(f.exact);
    assert_eq!(f.value, 0.0);
    assert_eq!(f.x_star(), Some(&[0.0][..]));
}

#[test]
fn missing_dataset_is_reported_with_its_path() {
    let cfg = config("problem = libsvm /nonexistent/a9a\nclients = 4\nrounds = 1\n");
    match run_experiment(&cfg) {
        Err(HarnessError::Data { path, .. } | HarnessError::Io { path, .. }) => {
            assert_eq!(path, std::path::Path::new("/nonexistent/a9a"));
        }
        other => panic!("expected a data error, got {other:?}"),
    }
}

#[test]
fn manifest_errors_name_the_line() {
    let err = ExperimentConfig::parse("problem = group 1\nrounds = ten\n").unwrap_err();
    assert!(matches!(err, HarnessError::Config { line: 2, .. }), "{err}");
    let err = ExperimentConfig::parse("problem = group 1\nrounds = 3\nrounds = 4\n").unwrap_err();
    assert!(matches!(err, HarnessError::Config { line: 3, .. }), "{err}");
    let err = ExperimentConfig::parse("problem = group 1\nwarmup = 3\n").unwrap_err();
    assert!(matches!(err, HarnessError::Config { line: 2, .. }), "{err}");
}

#[test]
fn overrides_replace_manifest_entries() {
    let over = vec!["rounds=7".to_string(), "methods = sfl".to_string()];
    let cfg =
        ExperimentConfig::parse_with_overrides("problem = group 1\nrounds = 3\n", &over).unwrap();
    assert_eq!(cfg.training.rounds, 7);
    assert_eq!(cfg.methods, [Method::Sfl]);
}

#[test]
fn shipped_configs_parse() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "conf") {
            ExperimentConfig::from_file(&path, &[])
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 3);
}
