//! Certification of candidate clusters: decides whether a set of `n/k`
//! vertices is essentially one community by searching for a trusted subset
//! that passes a size, a spectral and an edge-mass test.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphgen::Graph;
use crate::model::{DerivedQuantities, SbmParams};
use crate::seed;
use crate::spectral::{extreme_eigpair, CenteredMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Yes,
    No,
}

/// Knobs of the witness search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyConfig {
    /// Vertices with in-set degree above `degree_factor · α|S|/n` are dropped
    /// before peeling.
    pub degree_factor: f64,
    /// Fraction of `n/k` the witness must retain, before the `η + ρ` slack.
    pub purity: f64,
    /// Fraction of the ideal centered edge mass the witness must carry.
    pub mass_fraction: f64,
    /// Extra slack on the size floor, in units of `η n`.
    pub eta_slack: f64,
    /// Each peeling step removes `max(1, |z| / peel_divisor)` vertices.
    pub peel_divisor: usize,
    pub eig_tol: f64,
    pub eig_max_iters: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            degree_factor: 20.0,
            purity: 0.99,
            mass_fraction: 0.97,
            eta_slack: 1.0,
            peel_divisor: 500,
            eig_tol: 1e-3,
            eig_max_iters: 300,
            seed: 0,
        }
    }
}

/// Quantities the verdict was decided on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyStats {
    pub size: usize,
    pub size_floor: f64,
    /// `‖(G − (α/n)J) ⊙ zzᵀ‖` for the final witness.
    pub spectral: f64,
    pub spectral_bound: f64,
    /// `⟨(G − (d/n)J) ⊙ zzᵀ, 11ᵀ⟩` without the diagonal.
    pub mass: f64,
    pub mass_floor: f64,
    pub trimmed: usize,
    pub peeled: usize,
    pub spectral_converged: bool,
}

impl VerifyStats {
    pub fn size_ok(&self) -> bool {
        self.size as f64 >= self.size_floor
    }
    pub fn spectral_ok(&self) -> bool {
        self.spectral <= self.spectral_bound
    }
    pub fn mass_ok(&self) -> bool {
        self.mass >= self.mass_floor
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyOutcome {
    pub verdict: Verdict,
    /// Trusted subset of the candidate, ascending.
    pub witness: Vec<usize>,
    pub stats: VerifyStats,
}

impl VerifyOutcome {
    pub fn is_yes(&self) -> bool {
        self.verdict == Verdict::Yes
    }
}

/// Centered in-set edge mass `2 e(z) − (d/n)·|z|(|z|−1)`.
pub fn centered_mass(g: &Graph, z: &[usize], d: f64) -> f64 {
    let mut inside = vec![false; g.n()];
    z.iter().for_each(|&u| inside[u] = true);
    let m = z.len() as f64;
    2.0 * g.edges_within(&inside) as f64 - d / g.n() as f64 * m * (m - 1.0)
}

/// Largest-magnitude eigenpair of `G[z] − (α/n)J` with zero diagonal.
fn restricted_extreme(g: &Graph, z: &[usize], density: f64, cfg: &VerifyConfig) -> Result<(f64, Vec<f64>, bool)> {
    if z.is_empty() {
        return Ok((0.0, Vec::new(), true));
    }
    let sub = g.induced(z);
    let op = CenteredMatrix::with_density(&sub, density, None);
    let p = extreme_eigpair(&op, cfg.eig_tol, cfg.eig_max_iters, seed::derive(cfg.seed, z.len() as u64))?;
    Ok((p.value.abs(), p.vector, p.converged))
}

pub fn verify_cluster(g: &Graph, s: &[usize], params: &SbmParams, derived: &DerivedQuantities) -> Result<VerifyOutcome> {
    verify_cluster_with(g, s, params, derived, &VerifyConfig::default())
}

pub fn verify_cluster_with(
    g: &Graph,
    s: &[usize],
    params: &SbmParams,
    derived: &DerivedQuantities,
    cfg: &VerifyConfig,
) -> Result<VerifyOutcome> {
    let (n, k) = (params.n(), params.k());
    if g.n() != n {
        return Err(Error::DimensionMismatch(format!("graph has {} vertices, parameters {n}", g.n())));
    }
    if s.len() != n / k {
        return Err(Error::params(format!("candidate has {} vertices, expected n/k = {}", s.len(), n / k)));
    }
    let mut inside = vec![false; n];
    for &u in s {
        if u >= n || std::mem::replace(&mut inside[u], true) {
            return Err(Error::params(format!("candidate vertex {u} out of range or repeated")));
        }
    }
    let (d, eps, kf, nf) = (params.d(), params.eps(), k as f64, n as f64);
    let alpha = d + (1.0 - 1.0 / kf) * eps * d;
    let density = alpha / nf;
    let size_floor = (cfg.purity / kf - cfg.eta_slack * params.eta() - derived.rho()) * nf;
    let spectral_bound = derived.chi * (alpha / kf).sqrt();
    let mass_floor = cfg.mass_fraction * (kf - 1.0) * eps * d * nf / kf.powi(3);

    let cap = cfg.degree_factor * alpha * s.len() as f64 / nf;
    let mut z: Vec<usize> = s
        .iter()
        .copied()
        .filter(|&u| g.neighbors(u).iter().filter(|&&v| inside[v as usize]).count() as f64 <= cap)
        .collect();
    z.sort_unstable();
    let trimmed = s.len() - z.len();

    let mut peeled = 0;
    let (spectral, converged) = loop {
        let (value, vector, converged) = restricted_extreme(g, &z, density, cfg)?;
        if value <= spectral_bound || (z.len() as f64) < size_floor {
            break (value, converged);
        }
        let batch = (z.len() / cfg.peel_divisor.max(1)).max(1);
        let mut order: Vec<usize> = (0..z.len()).collect();
        order.sort_by(|&a, &b| vector[b].abs().total_cmp(&vector[a].abs()).then(a.cmp(&b)));
        let mut drop = vec![false; z.len()];
        order.iter().take(batch).for_each(|&i| drop[i] = true);
        z = z.iter().zip(&drop).filter(|(_, &x)| !x).map(|(&u, _)| u).collect();
        peeled += batch;
    };

    let stats = VerifyStats {
        size: z.len(),
        size_floor,
        spectral,
        spectral_bound,
        mass: centered_mass(g, &z, d),
        mass_floor,
        trimmed,
        peeled,
        spectral_converged: converged,
    };
    let verdict = if stats.size_ok() && stats.spectral_ok() && stats.mass_ok() {
        Verdict::Yes
    } else {
        Verdict::No
    };
    Ok(VerifyOutcome { verdict, witness: z, stats })
}

/// A candidate that passed verification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verified {
    /// Position in the candidate list.
    pub index: usize,
    pub outcome: VerifyOutcome,
}

/// Verifies every candidate and returns `k/2` of those accepted, largest
/// edge mass first.
pub fn select_verified(
    g: &Graph,
    candidates: &[Vec<usize>],
    params: &SbmParams,
    derived: &DerivedQuantities,
    cfg: &VerifyConfig,
) -> Result<(Vec<Verified>, Vec<VerifyOutcome>)> {
    let mut seen = vec![false; g.n()];
    for c in candidates {
        for &u in c {
            if u < seen.len() && std::mem::replace(&mut seen[u], true) {
                return Err(Error::params(format!("candidates overlap at vertex {u}")));
            }
        }
    }
    let outcomes: Vec<VerifyOutcome> = candidates
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let cfg = VerifyConfig { seed: seed::derive(cfg.seed, i as u64), ..cfg.clone() };
            verify_cluster_with(g, c, params, derived, &cfg)
        })
        .collect::<Result<_>>()?;
    let needed = params.k() / 2;
    let mut yes: Vec<Verified> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.is_yes())
        .map(|(index, o)| Verified { index, outcome: o.clone() })
        .collect();
    if yes.len() < needed {
        return Err(Error::InsufficientVerified { found: yes.len(), needed });
    }
    yes.sort_by(|a, b| b.outcome.stats.mass.total_cmp(&a.outcome.stats.mass).then(a.index.cmp(&b.index)));
    yes.truncate(needed);
    Ok((yes, outcomes))
}
