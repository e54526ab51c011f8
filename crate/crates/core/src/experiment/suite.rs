use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::graphgen::sample_sbm;
use crate::model::{derive, Bisection, SbmParams};
use crate::seed;
use crate::stats::{
    c_tilde, chernoff_tail_bound, concavity_check, level_params, level_tail_bound, log_r_bounds_check, mc_tail_check,
    worst_margin_check, MarginReport, MixtureSpec, TailReport,
};

/// Grid sizes of the analytic verifier suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsSuiteConfig {
    pub seed: u64,
    /// Draws per tail point.
    pub tail_trials: usize,
    /// Mixture scale `n` of the tail grid.
    pub tail_n: usize,
    /// Random parameter draws for the concavity check.
    pub concavity_draws: usize,
    /// Graphs per voting-margin point.
    pub margin_seeds: usize,
    pub margin_n: usize,
    pub margin_d: f64,
}

impl Default for StatsSuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tail_trials: 100_000,
            tail_n: 8000,
            concavity_draws: 1000,
            margin_seeds: 3,
            margin_n: 2000,
            margin_d: 500.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailCase {
    pub alpha: f64,
    pub beta: f64,
    pub d: f64,
    pub eps: f64,
    pub k: usize,
    /// Against the mixture bound.
    pub report: TailReport,
    /// Against the weaker level bound, where `α = 1/k` makes it applicable.
    pub level: Option<TailReport>,
}

impl TailCase {
    pub fn violated(&self) -> bool {
        self.report.violation || self.level.is_some_and(|l| l.violation)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginCase {
    pub level: usize,
    pub gamma: f64,
    pub seed: u64,
    pub report: MarginReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsSuiteReport {
    pub tails: Vec<TailCase>,
    /// `c_tilde(a, b, 1) = C` on every tail-grid parameter set.
    pub c_tilde_identity: bool,
    /// The tail bound at `θ = 0` equals `exp(−β C̃)`.
    pub theta_zero_identity: bool,
    pub concavity: bool,
    pub log_r_bounds: bool,
    /// `β_i C̃_i` nondecreasing in `i` on the grid.
    pub level_monotone: bool,
    pub margins: Vec<MarginCase>,
}

impl StatsSuiteReport {
    pub fn violations(&self) -> usize {
        self.tails.iter().filter(|t| t.violated()).count()
            + [self.c_tilde_identity, self.theta_zero_identity, self.concavity, self.log_r_bounds, self.level_monotone]
                .iter()
                .filter(|&&ok| !ok)
                .count()
            + self.margins.iter().filter(|m| !m.report.passed()).count()
    }
}

/// The planted bisection of level `i`: the first `k_i` communities of the
/// level's leftmost subproblem against the next `k_i`, zero elsewhere.
pub(crate) fn level_bisection(truth: &crate::model::Labeling, level_k: usize) -> Bisection {
    let x = truth
        .assign()
        .iter()
        .map(|&c| {
            if c < level_k {
                1
            } else if c < 2 * level_k {
                -1
            } else {
                0
            }
        })
        .collect();
    Bisection::new(x).expect("entries are signs")
}

/// Monte Carlo tail checks, analytic identities and voting-margin
/// falsification on fixed grids.
pub fn stats_suite(cfg: &StatsSuiteConfig) -> Result<StatsSuiteReport> {
    let d = 2000.0;
    let mut points = Vec::new();
    for &k in &[8usize, 16] {
        for &eps in &[0.5, 1.0] {
            for &alpha in &[0.125, 0.0625] {
                for &beta in &[0.5, 0.25] {
                    points.push((k, eps, alpha, beta));
                }
            }
        }
    }
    let mut c_tilde_identity = true;
    let mut theta_zero_identity = true;
    let mut tails = Vec::new();
    for (idx, &(k, eps, alpha, beta)) in points.iter().enumerate() {
        let params = SbmParams::new(cfg.tail_n, k, d, eps, 0.0)?;
        let dq = derive(&params)?;
        c_tilde_identity &= (c_tilde(dq.a, dq.b, 1.0)? - dq.c).abs() <= 1e-10 * dq.c;
        let spec = MixtureSpec::new(alpha, beta, dq.a, dq.b, cfg.tail_n)?;
        let expected = (-beta * c_tilde(dq.a, dq.b, spec.gamma())?).exp();
        theta_zero_identity &= chernoff_tail_bound(&spec, 0.0) == expected;
        for (j, theta) in [0.0, alpha * (dq.a - dq.b) / 2.0].into_iter().enumerate() {
            let s = seed::derive_path(cfg.seed, &[seed::tag("tail"), idx as u64, j as u64]);
            let report = mc_tail_check(&spec, theta, cfg.tail_trials, s)?;
            let level = ((alpha * k as f64 - 1.0).abs() < 1e-12)
                .then(|| report.against(level_tail_bound(&spec, theta, d, eps, k)));
            tails.push(TailCase { alpha, beta, d, eps, k, report, level });
        }
    }

    let mut rng = seed::rng(seed::derive(cfg.seed, seed::tag("concavity")));
    let concavity = (0..cfg.concavity_draws).all(|_| {
        use rand::Rng;
        let n = 1000.0;
        let a = rng.random_range(1.0..n);
        let b = rng.random_range(0.5..=a);
        let gamma = rng.random_range(0.0..1.0f64).max(1e-6);
        concavity_check(a, b, n, gamma, 1000)
    });

    let mut log_r_bounds = true;
    let mut level_monotone = true;
    for &k in &[2usize, 4, 8, 16] {
        for &eps in &[1e-3, 0.5, 1.0] {
            for &d in &[100.0, 2000.0] {
                let params = SbmParams::new(1_000_000, k, d, eps, 0.0)?;
                let levels = k.trailing_zeros() as usize;
                let mut prev = f64::NEG_INFINITY;
                for i in 1..=levels {
                    log_r_bounds &= log_r_bounds_check(&params, i)?.holds;
                    let lp = level_params(i, &params)?;
                    let v = lp.beta * lp.c_tilde;
                    level_monotone &= v >= prev * (1.0 - 1e-12);
                    prev = v;
                }
            }
        }
    }

    let params = SbmParams::new(cfg.margin_n, 8, cfg.margin_d, 1.0, 0.0)?;
    let jobs: Vec<(usize, f64, u64)> = (1..=3)
        .flat_map(|i| [0.0, 0.5].into_iter().flat_map(move |gm| (0..cfg.margin_seeds as u64).map(move |s| (i, gm, s))))
        .collect();
    let margins = jobs
        .par_iter()
        .map(|&(i, gamma, s)| {
            let gseed = seed::derive_path(cfg.seed, &[seed::tag("margin"), s]);
            let (g, truth) = sample_sbm(&params, gseed)?;
            let lp = level_params(i, &params)?;
            let y = level_bisection(&truth, lp.k_i);
            let report = worst_margin_check(&g, &y, &params, &lp, gamma, None)?;
            Ok(MarginCase { level: i, gamma, seed: gseed, report })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(StatsSuiteReport {
        tails,
        c_tilde_identity,
        theta_zero_identity,
        concavity,
        log_r_bounds,
        level_monotone,
        margins,
    })
}
