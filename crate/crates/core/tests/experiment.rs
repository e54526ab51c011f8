use blockmodel_lab::experiment::{
    csv_string, emit_csv, emit_plotdata, plot_points, run_experiment, ExperimentConfig, RESULT_HEADER,
};

const SWEEP: &str = r#"
seed = 42
trials = 2

[model]
n = 1000
k = [2, 4]
eps = [0.6, 1.0]
c_over_k = 4.0

[adversary]
strategy = "random_rewire"
eta = [0.0, 0.01]
"#;

#[test]
fn config_round_trips_through_toml() {
    let cfg = ExperimentConfig::from_toml_str(SWEEP).unwrap();
    assert_eq!(cfg.planned_runs().unwrap(), 2 * 2 * 2 * 2);
    let again = ExperimentConfig::from_toml_str(&cfg.to_toml()).unwrap();
    assert_eq!(again, cfg);
    assert_eq!(again.grid().unwrap().len(), cfg.grid().unwrap().len());
}

#[test]
fn sweeps_are_deterministic_and_well_formed() {
    let cfg = ExperimentConfig::from_toml_str(SWEEP).unwrap();
    let rows = run_experiment(&cfg).unwrap();
    assert_eq!(rows.len(), 16);
    for r in &rows {
        for e in [r.init_error, r.bisection_error, r.recursive_error, r.final_error].into_iter().flatten() {
            assert!((0.0..=1.0).contains(&e));
        }
        assert_eq!(r.status, "ok", "{}", r.failure);
    }
    let pairs: Vec<(usize, usize)> = rows.iter().map(|r| (r.grid_index, r.trial)).collect();
    let mut sorted = pairs.clone();
    sorted.sort();
    assert_eq!(pairs, sorted);
    let again = run_experiment(&cfg).unwrap();
    assert_eq!(csv_string(&rows).unwrap(), csv_string(&again).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/results.csv");
    emit_csv(&rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, csv_string(&rows).unwrap());
    assert_eq!(text.lines().next().unwrap(), RESULT_HEADER.join(","));
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.records().count(), rows.len());

    emit_plotdata(&rows, &dir.path().join("plot.csv")).unwrap();
    let points = plot_points(&rows);
    assert_eq!(points.len(), 2 * 8);
    assert!(points.iter().all(|p| p.y.is_finite()));
}

#[test]
fn dropping_a_grid_point_leaves_other_rows_alone() {
    let full = ExperimentConfig::from_toml_str(SWEEP).unwrap();
    let reduced = ExperimentConfig::from_toml_str(&SWEEP.replace("eps = [0.6, 1.0]", "eps = 1.0")).unwrap();
    let a = run_experiment(&full).unwrap();
    let b = run_experiment(&reduced).unwrap();
    let strip = |r: &blockmodel_lab::experiment::ResultRow| {
        let mut r = r.clone();
        r.grid_index = 0;
        r.times = Default::default();
        r
    };
    let kept: Vec<_> = a.iter().filter(|r| r.eps == 1.0).map(strip).collect();
    let other: Vec<_> = b.iter().map(strip).collect();
    assert_eq!(kept, other);
}
