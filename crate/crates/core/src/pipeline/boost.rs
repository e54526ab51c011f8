use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphgen::Graph;
use crate::model::{rebalance_by_cost, Bisection, SbmParams};
use crate::spectral::trim_high_degree;
use crate::stats::VoteParams;
use crate::vote::signed_votes;

/// Robustness knobs of the voting rounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoostConfig {
    /// Vertices of degree above `trim_factor · d` never vote.
    pub trim_factor: f64,
    /// Vertices whose centered vote exceeds `vote_cap · εd` in magnitude are
    /// silenced for the next round. `None` disables capping.
    pub vote_cap: Option<f64>,
}

impl Default for BoostConfig {
    fn default() -> Self {
        Self { trim_factor: 20.0, vote_cap: Some(5.0) }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoostReport {
    pub rounds_run: usize,
    /// Vertices changing sign in each round.
    pub changed: Vec<usize>,
    pub trimmed: usize,
    /// Vertices silenced by the cap after the last round.
    pub capped: usize,
    /// Support vertices with margin below `α_γ` in the final labeling.
    pub low_margin: usize,
    /// `β n_i`, the number of low-margin vertices the voting constraint allows.
    pub low_margin_allowed: f64,
}

#[derive(Clone, Debug)]
pub struct BoostOutcome {
    pub bisection: Bisection,
    /// `(Ḡx)_u · x_u` on the support, `0` elsewhere.
    pub margins: Vec<f64>,
    pub report: BoostReport,
}

/// `⌈log₂ m⌉`, at least one.
pub fn default_rounds(m: usize) -> usize {
    (usize::BITS - m.saturating_sub(1).leading_zeros()).max(1) as usize
}

/// Iterated trimmed, capped sign voting on the support of `x0`. Each round
/// sets `x_u ← sign((Ḡx)_u)` for untrimmed support vertices, keeping the
/// previous sign on ties; trimmed support vertices take one final vote.
/// The result is not rebalanced; see [`rebalance_bisection`].
pub fn boost_bisection(
    g: &Graph,
    x0: &Bisection,
    params: &SbmParams,
    vp: &VoteParams,
    cfg: &BoostConfig,
) -> Result<BoostOutcome> {
    let n = g.n();
    if x0.n() != n || params.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "graph has {n} vertices, bisection {}, parameters {}",
            x0.n(),
            params.n()
        )));
    }
    let density = params.d() / n as f64;
    let mask = trim_high_degree(g, cfg.trim_factor * params.d())?;
    let active: Vec<bool> = (0..n).map(|u| x0.in_support(u) && mask.is_kept(u)).collect();
    let cap = cfg.vote_cap.map(|c| c * params.eps() * params.d()).filter(|&c| c > 0.0);
    let rounds = vp.rounds.unwrap_or_else(|| default_rounds(x0.support_size()));

    let mut x = x0.x().to_vec();
    let mut influence = active.clone();
    let mut report = BoostReport { trimmed: (0..n).filter(|&u| x0.in_support(u) && !mask.is_kept(u)).count(), ..Default::default() };
    for _ in 0..rounds {
        if !influence.iter().any(|&b| b) {
            return Err(Error::EmptyTrustedSet);
        }
        let votes = signed_votes(g, &x, &influence, density);
        let mut changed = 0;
        for u in (0..n).filter(|&u| active[u]) {
            let s = if votes[u] > 0.0 { 1 } else if votes[u] < 0.0 { -1 } else { x[u] };
            if s != x[u] {
                x[u] = s;
                changed += 1;
            }
        }
        let next: Vec<bool> = (0..n).map(|u| active[u] && cap.is_none_or(|c| votes[u].abs() <= c)).collect();
        let settled = changed == 0 && next == influence;
        influence = next;
        report.rounds_run += 1;
        report.changed.push(changed);
        if settled {
            break;
        }
    }
    if !influence.iter().any(|&b| b) {
        return Err(Error::EmptyTrustedSet);
    }
    report.capped = (0..n).filter(|&u| active[u] && !influence[u]).count();

    let votes = signed_votes(g, &x, &influence, density);
    for u in (0..n).filter(|&u| x0.in_support(u) && !mask.is_kept(u)) {
        if votes[u] != 0.0 {
            x[u] = if votes[u] > 0.0 { 1 } else { -1 };
        }
    }
    let votes = signed_votes(g, &x, &influence, density);
    let margins: Vec<f64> = (0..n).map(|u| votes[u] * x[u] as f64).collect();
    report.low_margin = (0..n).filter(|&u| x[u] != 0 && margins[u] < vp.alpha_gamma).count();
    report.low_margin_allowed = vp.beta_bound * x0.support_size() as f64;
    Ok(BoostOutcome { bisection: Bisection::new(x)?, margins, report })
}

/// Moves the smallest-margin vertices off the larger side until both sides
/// hold half the support. Returns the number of moves.
pub fn rebalance_bisection(x: &Bisection, margins: &[f64]) -> Result<(Bisection, usize)> {
    let support: Vec<usize> = (0..x.n()).filter(|&u| x.in_support(u)).collect();
    if support.len() % 2 != 0 {
        return Err(Error::params(format!("support of size {} cannot be halved", support.len())));
    }
    let mut assign: Vec<usize> = support.iter().map(|&u| usize::from(x.x()[u] < 0)).collect();
    let before = assign.clone();
    rebalance_by_cost(&mut assign, 2, support.len() / 2, |i, _| 2.0 * margins[support[i]]);
    let mut out = x.x().to_vec();
    for (i, &u) in support.iter().enumerate() {
        out[u] = if assign[i] == 0 { 1 } else { -1 };
    }
    let moved = assign.iter().zip(&before).filter(|(a, b)| a != b).count();
    Ok((Bisection::new(out)?, moved))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_default_is_ceil_log2() {
        assert_eq!(default_rounds(1), 1);
        assert_eq!(default_rounds(2), 1);
        assert_eq!(default_rounds(1000), 10);
        assert_eq!(default_rounds(1024), 10);
        assert_eq!(default_rounds(1025), 11);
    }

    #[test]
    fn rebalance_moves_weakest() {
        let x = Bisection::new(vec![1, 1, -1, 0]).unwrap();
        let (y, moved) = rebalance_bisection(&Bisection::new(vec![1, 1, 1, -1]).unwrap(), &[3.0, 0.5, 2.0, 1.0]).unwrap();
        assert_eq!(moved, 1);
        assert_eq!(y.x(), &[1, -1, 1, -1]);
        assert!(rebalance_bisection(&x, &[0.0; 4]).is_err());
    }
}
