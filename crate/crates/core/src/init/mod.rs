//! Rough k-clustering: degree trimming, a spectral or semidefinite
//! embedding, balanced k-means rounding, and a few rounds of centered
//! majority refinement.

mod kmeans;

use serde::{Deserialize, Serialize};

pub use kmeans::{balanced_assign, balanced_kmeans, clustering_cost, kmeans_fit, KmeansFit};

use crate::error::Result;
use crate::graphgen::Graph;
use crate::model::{rebalance_by_cost, Labeling, SbmParams};
use crate::sdp::solve_basic_sdp;
use crate::seed;
use crate::spectral::{center, top_eigvecs, trim_high_degree};
use crate::vote::{argmax_keep, community_scores};

/// Embedding used before k-means rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Spectral,
    Sdp,
    /// The semidefinite backend up to [`InitConfig::sdp_max_n`] kept
    /// vertices, spectral above.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InitConfig {
    pub backend: Backend,
    pub kmeans_restarts: usize,
    pub seed: u64,
    /// Vertices of degree above `trim_factor · d` are trimmed.
    pub trim_factor: f64,
    /// Below `ε²d ≥ snr_floor · k²` the result is flagged.
    pub snr_floor: f64,
    /// Rounds of trimmed argmax voting applied after rounding.
    pub refine_rounds: usize,
    pub eig_tol: f64,
    pub eig_max_iters: usize,
    pub sdp_max_n: usize,
    pub sdp_tol: f64,
    pub sdp_max_iters: usize,
}

impl Default for InitConfig {
    fn default() -> Self {
        Self {
            backend: Backend::Auto,
            kmeans_restarts: 20,
            seed: 0,
            trim_factor: 20.0,
            snr_floor: 100.0,
            refine_rounds: 2,
            eig_tol: 1e-6,
            eig_max_iters: 300,
            sdp_max_n: 200,
            sdp_tol: 1e-6,
            sdp_max_iters: 500,
        }
    }
}

/// Diagnostics attached to a rough labeling.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct InitQuality {
    /// Any of the conditions below holds.
    pub flagged: bool,
    pub below_snr_floor: bool,
    pub embedding_converged: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct InitOutcome {
    pub labeling: Labeling,
    pub quality: InitQuality,
    pub trimmed: usize,
    pub backend: Backend,
}

/// Computes a balanced rough labeling. Never fails on hard instances:
/// problems with the embedding are reported through [`InitQuality`].
pub fn rough_init(g: &Graph, params: &SbmParams, cfg: &InitConfig) -> Result<InitOutcome> {
    let (n, k, d) = (params.n(), params.k(), params.d());
    let mut quality = InitQuality { embedding_converged: true, ..Default::default() };
    if params.eps().powi(2) * d < cfg.snr_floor * (k * k) as f64 {
        quality.below_snr_floor = true;
        log::warn!("rough_init: eps²d = {:.1} below {} k²", params.eps().powi(2) * d, cfg.snr_floor);
    }
    let mask = trim_high_degree(g, cfg.trim_factor * d)?;
    let kept: Vec<usize> = (0..n).filter(|&u| mask.is_kept(u)).collect();
    let backend = match cfg.backend {
        Backend::Auto if kept.len() <= cfg.sdp_max_n => Backend::Sdp,
        Backend::Auto => Backend::Spectral,
        b => b,
    };
    let op = center(g, d, Some(&mask));
    let points: Vec<Vec<f64>> = if kept.len() < k {
        quality.notes.push("fewer kept vertices than communities".into());
        quality.embedding_converged = false;
        vec![vec![0.0]; n]
    } else {
        match backend {
            Backend::Sdp => {
                let sol = solve_basic_sdp(&op, k, cfg.sdp_tol, cfg.sdp_max_iters)?;
                if !sol.converged {
                    quality.embedding_converged = false;
                    quality.notes.push(format!("sdp stopped at primal residual {:.2e}", sol.primal_residual));
                }
                let mut local = vec![usize::MAX; n];
                for (i, &u) in sol.vertices.iter().enumerate() {
                    local[u] = i;
                }
                let width = sol.vertices.len();
                (0..n)
                    .map(|u| {
                        if local[u] != usize::MAX {
                            return sol.m.row(local[u]).iter().copied().collect();
                        }
                        let mut acc = vec![0.0; width];
                        let mut count = 0;
                        for &v in g.neighbors(u) {
                            if local[v as usize] != usize::MAX {
                                count += 1;
                                acc.iter_mut().zip(sol.m.row(local[v as usize]).iter()).for_each(|(a, x)| *a += x);
                            }
                        }
                        acc.iter_mut().for_each(|a| *a /= count.max(1) as f64);
                        acc
                    })
                    .collect()
            }
            _ => {
                let r = (k - 1).max(1);
                let eig = top_eigvecs(&op, r, cfg.eig_tol, cfg.eig_max_iters, seed::derive(cfg.seed, seed::tag("lanczos")))?;
                if !eig.converged {
                    quality.embedding_converged = false;
                    quality.notes.push(format!("eigensolver stopped after {} steps", eig.iterations));
                }
                // Row u of Ḡ[:, kept] V; for kept vertices this is λ_j v_j(u).
                let cols: Vec<Vec<f64>> = eig
                    .vectors
                    .iter()
                    .map(|v| {
                        let masked: Vec<f64> = v.iter().zip(mask.keep()).map(|(x, &m)| if m { *x } else { 0.0 }).collect();
                        let total: f64 = masked.iter().sum();
                        (0..n)
                            .map(|u| {
                                let s: f64 = g.neighbors(u).iter().map(|&w| masked[w as usize]).sum();
                                s - op.density() * (total - masked[u])
                            })
                            .collect()
                    })
                    .collect();
                (0..n).map(|u| cols.iter().map(|c| c[u]).collect()).collect()
            }
        }
    };
    let kept_points: Vec<Vec<f64>> = kept.iter().map(|&u| points[u].clone()).collect();
    let fit_points = if kept_points.len() >= k { &kept_points } else { &points };
    let fit = kmeans_fit(fit_points, k, cfg.kmeans_restarts, seed::derive(cfg.seed, seed::tag("kmeans")))?;
    let mut labeling = balanced_assign(&points, &fit.centroids)?;

    if cfg.refine_rounds > 0 {
        let mut assign = labeling.into_vec();
        let density = d / n as f64;
        for _ in 0..cfg.refine_rounds {
            let scores = community_scores(g, &assign, k, mask.keep(), density);
            let next: Vec<usize> = (0..n).map(|u| argmax_keep(&scores[u * k..(u + 1) * k], assign[u])).collect();
            assign = next;
            let current = assign.clone();
            rebalance_by_cost(&mut assign, k, n / k, |u, t| scores[u * k + current[u]] - scores[u * k + t]);
        }
        labeling = Labeling::new(assign, k)?;
    }
    quality.flagged = quality.below_snr_floor || !quality.embedding_converged;
    Ok(InitOutcome { labeling, quality, trimmed: mask.trimmed(), backend })
}
