//! Seeded parameter sweeps: configuration files, trial-parallel execution and
//! CSV / plot-data output.

mod config;
mod suite;

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{parse_config, AdversaryConfig, ExperimentConfig, GridPoint, ModelGrid, PipelineKnobs};
pub use suite::{stats_suite, MarginCase, StatsSuiteConfig, StatsSuiteReport, TailCase};

use crate::error::{Error, Result};
use crate::graphgen::{corrupt, sample_sbm, Strategy};
use crate::model::{derive, SbmParams};
use crate::pipeline::{run_full_pipeline, PipelineConfig, PipelineMetrics, StageTimes};
use crate::seed;
use crate::stats::level_params;

/// Bumped whenever a column is added, removed or reinterpreted.
pub const SCHEMA_VERSION: u32 = 1;

/// Column names of the results CSV, in order.
pub const RESULT_HEADER: &[&str] = &[
    "schema_version",
    "grid_index",
    "trial",
    "seed",
    "n",
    "k",
    "d",
    "eps",
    "eta",
    "strategy",
    "c",
    "c_over_k",
    "c_tilde",
    "status",
    "failure",
    "schedule_rejected",
    "init_error",
    "bisection_error",
    "recursive_error",
    "final_error",
    "log_error",
    "target_bisection",
    "target_recursive",
    "target_final",
    "trimmed_fraction",
    "capped",
    "attempts",
    "verdicts_yes",
    "verdicts_no",
];

/// One run of one grid point. Runtimes are kept out of the CSV so that
/// reruns are byte-identical; see [`emit_timings`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub schema_version: u32,
    pub grid_index: usize,
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub d: f64,
    pub eps: f64,
    pub eta: f64,
    pub strategy: String,
    pub c: f64,
    pub c_over_k: f64,
    /// Top-level bisection SNR.
    pub c_tilde: f64,
    /// `ok` or `failed`.
    pub status: String,
    pub failure: String,
    pub schedule_rejected: bool,
    pub init_error: Option<f64>,
    pub bisection_error: Option<f64>,
    pub recursive_error: Option<f64>,
    pub final_error: Option<f64>,
    /// `−ln(max(final_error, 1/(2n)))`.
    pub log_error: Option<f64>,
    pub target_bisection: f64,
    pub target_recursive: f64,
    pub target_final: f64,
    pub trimmed_fraction: f64,
    pub capped: usize,
    pub attempts: usize,
    pub verdicts_yes: usize,
    pub verdicts_no: usize,
    #[serde(skip)]
    pub times: StageTimes,
}

/// `−ln(max(error, 1/(2n)))`, finite for exact recovery.
pub fn log_error(error: f64, n: usize) -> f64 {
    -error.max(0.5 / n as f64).ln()
}

impl ResultRow {
    /// A row with the coordinates and analytic targets filled in and no
    /// measurements yet.
    pub fn new(params: &SbmParams, strategy: Option<Strategy>, c_over_k: Option<f64>) -> Result<Self> {
        let dq = derive(params)?;
        let top = level_params(1, params)?;
        let (k, n) = (params.k(), params.n());
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            grid_index: 0,
            trial: 0,
            seed: 0,
            n,
            k,
            d: params.d(),
            eps: params.eps(),
            eta: params.eta(),
            strategy: strategy.map_or_else(|| "none".to_string(), |st| st.to_string()),
            c: dq.c,
            c_over_k: c_over_k.unwrap_or(dq.c / k as f64),
            c_tilde: top.c_tilde,
            status: "ok".into(),
            failure: String::new(),
            schedule_rejected: false,
            init_error: None,
            bisection_error: None,
            recursive_error: None,
            final_error: None,
            log_error: None,
            target_bisection: (-top.c_tilde / 8.0).exp(),
            target_recursive: (-dq.c / (k * k) as f64).exp(),
            target_final: (-dq.c / k as f64).exp(),
            trimmed_fraction: 0.0,
            capped: 0,
            attempts: 0,
            verdicts_yes: 0,
            verdicts_no: 0,
            times: StageTimes::default(),
        })
    }

    /// Copies the measurements of a pipeline run, or its failure, into the row.
    pub fn record(&mut self, outcome: &Result<PipelineMetrics>) {
        match outcome {
            Ok(m) => {
                self.schedule_rejected = m.schedule_note.is_some();
                self.init_error = m.init_error;
                self.bisection_error = m.bisection_mismatch;
                self.recursive_error = m.recursive_error;
                self.final_error = m.final_error;
                self.log_error = m.final_error.map(|e| log_error(e, self.n));
                self.trimmed_fraction = m.trimmed_fraction;
                self.capped = m.capped;
                self.attempts = m.attempts;
                self.verdicts_yes = m.verdicts_yes;
                self.verdicts_no = m.verdicts_no;
                self.times = m.times;
                if !m.failures.is_empty() {
                    self.status = "failed".into();
                    self.failure = m.failures.join("; ");
                }
            }
            Err(e) => {
                self.status = "failed".into();
                self.failure = e.to_string();
            }
        }
    }
}

fn run_point(point: &GridPoint, trial: usize, master: u64, pcfg: &PipelineConfig) -> Result<ResultRow> {
    let params = &point.params;
    let s = point.trial_seed(master, trial);
    let mut row = ResultRow { grid_index: point.index, trial, seed: s, ..ResultRow::new(params, point.strategy, point.c_over_k)? };
    let outcome = (|| {
        let (mut g, truth) = sample_sbm(params, seed::derive(s, seed::tag("graph")))?;
        if let Some(st) = point.strategy {
            g = corrupt(&g, &truth, params, st, seed::derive(s, seed::tag("attack")))?.0;
        }
        run_full_pipeline(&g, params, pcfg, seed::derive(s, seed::tag("pipeline")), Some(&truth)).map(|(_, m)| m)
    })();
    row.record(&outcome);
    Ok(row)
}

/// Runs every grid point `trials` times in parallel. Algorithmic failures
/// are recorded in their row; the returned rows are ordered by grid index
/// then trial.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let grid = cfg.grid()?;
    let pcfg = cfg.pipeline.to_config();
    let plan: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..cfg.trials).map(move |t| (g, t))).collect();
    plan.par_iter()
        .map(|&(g, t)| {
            let row = run_point(&grid[g], t, cfg.seed, &pcfg)?;
            log::info!("grid point {g} trial {t}: {} final error {:?}", row.status, row.final_error);
            Ok(row)
        })
        .collect()
}

fn create(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(csv::Writer::from_path(path)?)
}

fn nonempty<T>(rows: &[T]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::params("no rows to write"));
    }
    Ok(())
}

/// Writes the rows as CSV. The header is [`RESULT_HEADER`].
pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    nonempty(rows)?;
    let mut w = create(path)?;
    rows.iter().try_for_each(|r| w.serialize(r))?;
    w.flush()?;
    Ok(())
}

/// Serializes rows to an in-memory CSV string, as [`emit_csv`] would write.
pub fn csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    rows.iter().try_for_each(|r| w.serialize(r))?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Serialize)]
struct TimingRow {
    grid_index: usize,
    trial: usize,
    recursive_ms: f64,
    pairwise_ms: f64,
    total_ms: f64,
}

/// Writes the per-run stage runtimes next to the results.
pub fn emit_timings(rows: &[ResultRow], path: &Path) -> Result<()> {
    nonempty(rows)?;
    let mut w = create(path)?;
    for r in rows {
        w.serialize(TimingRow {
            grid_index: r.grid_index,
            trial: r.trial,
            recursive_ms: r.times.recursive_ms,
            pairwise_ms: r.times.pairwise_ms,
            total_ms: r.times.total_ms,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// A point of a plotted curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlotPoint {
    pub x: f64,
    /// `−ln(max(median error, 1/(2n)))`.
    pub y: f64,
    pub series: String,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// Median final error per grid point, arranged as error-vs-`C/k` curves
/// (one series per `n, k, η`) and error-vs-`η` curves (one per `n, k, C/k`).
pub fn plot_points(rows: &[ResultRow]) -> Vec<PlotPoint> {
    let mut by_point: BTreeMap<usize, (&ResultRow, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        if let Some(e) = r.final_error {
            by_point.entry(r.grid_index).or_insert_with(|| (r, Vec::new())).1.push(e);
        }
    }
    let mut out = Vec::new();
    for (r, errs) in by_point.values() {
        let y = log_error(median(errs.clone()), r.n);
        out.push(PlotPoint { x: r.c_over_k, y, series: format!("vs_c_over_k n={} k={} eta={}", r.n, r.k, r.eta) });
        out.push(PlotPoint { x: r.eta, y, series: format!("vs_eta n={} k={} c_over_k={:.4}", r.n, r.k, r.c_over_k) });
    }
    out.sort_by(|a, b| a.series.cmp(&b.series).then(a.x.total_cmp(&b.x)));
    out
}

/// Writes [`plot_points`] as `x,y,series` CSV.
pub fn emit_plotdata(rows: &[ResultRow], path: &Path) -> Result<()> {
    nonempty(rows)?;
    let mut w = create(path)?;
    plot_points(rows).iter().try_for_each(|p| w.serialize(p))?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_error_floor() {
        assert_eq!(log_error(0.0, 50), -(0.01f64).ln());
        assert_eq!(log_error(0.5, 50), -(0.5f64).ln());
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn empty_rows_rejected_without_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        assert!(emit_csv(&[], &path).is_err());
        assert!(!path.exists());
    }
}
