use super::boost::{boost_bisection, rebalance_bisection, BoostReport};
use super::PipelineConfig;
use crate::error::{Error, Result};
use crate::graphgen::{split_graph, Graph};
use crate::init::{rough_init, InitConfig, InitOutcome};
use crate::model::{derive, derive_with_chi, Bisection, Labeling, SbmParams};
use crate::seed;
use crate::stats::{level_params, vote_params, VoteMode, VoteParams};
use crate::verify::{select_verified, VerifyConfig, VerifyOutcome};

#[derive(Clone, Debug)]
pub struct BisectionOutcome {
    /// Balanced: each side holds half the vertices.
    pub bisection: Bisection,
    /// Rough labeling of the dense edge part that seeded the bisection.
    pub init: InitOutcome,
    /// Indices of the verified candidates placed on the `+` side.
    pub verified: Vec<usize>,
    /// Verdicts for every candidate of the successful attempt.
    pub verdicts: Vec<VerifyOutcome>,
    /// Attempts used, counting the successful one.
    pub attempts: usize,
    pub vote_params: Option<VoteParams>,
    pub boost: BoostReport,
    /// Vertices moved by the final rebalancing.
    pub rebalanced: usize,
}

/// Split the edges, label roughly on the dense part, certify `k/2` clusters
/// on the sparse part, put them on the `+` side and boost on the full graph.
/// A failed certification is retried with a fresh split up to
/// `cfg.max_attempts` times.
pub fn robust_bisection(g: &Graph, params: &SbmParams, cfg: &PipelineConfig, seed: u64) -> Result<BisectionOutcome> {
    if g.n() != params.n() {
        return Err(Error::DimensionMismatch(format!("graph has {} vertices, parameters {}", g.n(), params.n())));
    }
    let k = params.k();
    let dense = params.thinned(cfg.split_prob)?;
    let sparse = params.thinned(1.0 - cfg.split_prob)?;
    let sparse_dq = derive_with_chi(&sparse, cfg.chi)?;
    let mut last = Error::InsufficientVerified { found: 0, needed: k / 2 };
    for attempt in 0..cfg.max_attempts.max(1) {
        let s = seed::derive(seed, attempt as u64);
        let (g1, g2) = split_graph(g, cfg.split_prob, seed::derive(s, seed::tag("split")))?;
        let init_cfg = InitConfig { seed: seed::derive(s, seed::tag("init")), ..cfg.init.clone() };
        let init = rough_init(&g1, &dense, &init_cfg)?;
        let candidates: Vec<Vec<usize>> = (0..k).map(|c| init.labeling.members(c)).collect();
        let verify_cfg = VerifyConfig { seed: seed::derive(s, seed::tag("verify")), ..cfg.verify.clone() };
        let (verified, verdicts) = match select_verified(&g2, &candidates, &sparse, &sparse_dq, &verify_cfg) {
            Ok(v) => v,
            Err(e @ Error::InsufficientVerified { .. }) => {
                log::info!("robust_bisection: attempt {attempt} failed: {e}");
                last = e;
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut plus = vec![false; k];
        verified.iter().for_each(|v| plus[v.index] = true);
        let rough = Bisection::from_groups(&init.labeling, &plus, None);

        let vp = level_params(1, params)
            .and_then(|level| vote_params(cfg.gamma, &level, params, &derive(params)?, VoteMode::Bisection))
            .ok()
            .map(|vp| match cfg.rounds {
                Some(r) => vp.with_rounds(r),
                None => vp,
            });
        let fallback = VoteParams {
            gamma: cfg.gamma,
            mode: VoteMode::Bisection,
            rho: 1.0,
            alpha_gamma: 0.0,
            beta_bound: 1.0,
            t: 0.0,
            rounds: cfg.rounds,
        };
        let boosted = boost_bisection(g, &rough, params, vp.as_ref().unwrap_or(&fallback), &cfg.boost)?;
        let (bisection, rebalanced) = rebalance_bisection(&boosted.bisection, &boosted.margins)?;
        return Ok(BisectionOutcome {
            bisection,
            init,
            verified: verified.iter().map(|v| v.index).collect(),
            verdicts,
            attempts: attempt + 1,
            vote_params: vp,
            boost: boosted.report,
            rebalanced,
        });
    }
    Err(last)
}

/// One bisection of the recursion.
#[derive(Clone, Debug)]
pub struct LevelRecord {
    /// 1 at the top.
    pub level: usize,
    /// Global ids of the subproblem's vertices.
    pub vertices: Vec<usize>,
    pub outcome: BisectionOutcome,
}

#[derive(Clone, Debug)]
pub struct RecursiveOutcome {
    pub labeling: Labeling,
    /// Bisections in depth-first order; the first is the top level.
    pub levels: Vec<LevelRecord>,
}

impl RecursiveOutcome {
    pub fn top(&self) -> &BisectionOutcome {
        &self.levels[0].outcome
    }
}

/// Bisect recursively down to single communities. Level `i` splits `2^{i−1}`
/// subproblems of `n / 2^{i−1}` vertices each; every split is balanced, so the
/// leaves have exactly `n/k` vertices.
pub fn recursive_kcluster(g: &Graph, params: &SbmParams, cfg: &PipelineConfig, seed: u64) -> Result<RecursiveOutcome> {
    let (n, k) = (params.n(), params.k());
    let mut assign = vec![0usize; n];
    let mut levels = Vec::new();
    let mut next_label = 0;
    let all: Vec<usize> = (0..n).collect();
    recurse(g, params, &all, 1, 0, cfg, seed, &mut assign, &mut next_label, &mut levels)?;
    debug_assert_eq!(next_label, k);
    Ok(RecursiveOutcome { labeling: Labeling::new(assign, k)?, levels })
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    g: &Graph,
    params: &SbmParams,
    vertices: &[usize],
    level: usize,
    part: u64,
    cfg: &PipelineConfig,
    seed: u64,
    assign: &mut [usize],
    next_label: &mut usize,
    levels: &mut Vec<LevelRecord>,
) -> Result<()> {
    let s = seed::derive_path(seed, &[level as u64, part]);
    let outcome = robust_bisection(g, params, cfg, s).map_err(|e| e.at_stage(&format!("level {level}")))?;
    let x = outcome.bisection.x().to_vec();
    levels.push(LevelRecord { level, vertices: vertices.to_vec(), outcome });
    let k = params.k();
    for (side, sign) in [(0u64, 1i8), (1, -1)] {
        let local: Vec<usize> = (0..x.len()).filter(|&u| x[u] == sign).collect();
        let global: Vec<usize> = local.iter().map(|&u| vertices[u]).collect();
        if k == 2 {
            global.iter().for_each(|&u| assign[u] = *next_label);
            *next_label += 1;
        } else {
            let sub = params.restricted(k / 2).map_err(|e| e.at_stage(&format!("level {level}")))?;
            let h = g.induced(&local);
            recurse(&h, &sub, &global, level + 1, 2 * part + side, cfg, seed, assign, next_label, levels)?;
        }
    }
    Ok(())
}
