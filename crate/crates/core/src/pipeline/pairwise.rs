use serde::Serialize;

use super::boost::BoostConfig;
use crate::error::{Error, Result};
use crate::graphgen::Graph;
use crate::model::{rebalance_by_cost, DerivedQuantities, Labeling, SbmParams};
use crate::spectral::trim_high_degree;
use crate::vote::{argmax_keep, community_scores};

/// Parameters of one voting round of the final refinement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RoundParams {
    /// Allowed distance to the starting labeling.
    pub mu: f64,
    pub gamma: f64,
    /// Predicted error after the round.
    pub beta: f64,
}

/// The two refinement rounds: a first round with `γ = 0.99` bringing the
/// error to `1000k·exp(−0.99 C/k)` and a sharpening round reaching
/// `exp(−(1 − 10χk/√C) C/k)` up to a `√C/(10χ)` factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoostSchedule {
    pub round1: RoundParams,
    pub round2: RoundParams,
}

impl BoostSchedule {
    /// Rejected unless `C > (10χk)²`, where `γ_opt` leaves `(0, 1)`.
    pub fn new(n: usize, k: usize, derived: &DerivedQuantities) -> Result<Self> {
        let (c, chi, kf) = (derived.c, derived.chi, k as f64);
        let floor = (10.0 * chi * kf).powi(2);
        if !(c > floor) {
            return Err(Error::ScheduleRejected(format!("C = {c:.2} does not exceed (10χk)² = {floor:.0}")));
        }
        let gamma_opt = 1.0 - 10.0 * chi * kf / c.sqrt();
        Ok(Self {
            round1: RoundParams {
                mu: n as f64 / (kf * kf),
                gamma: 0.99,
                beta: 1000.0 * kf * (-0.99 * c / kf).exp(),
            },
            round2: RoundParams {
                mu: (-0.99 * c / kf).exp(),
                gamma: gamma_opt,
                beta: c.sqrt() / (10.0 * chi) * (-gamma_opt * c / kf).exp(),
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairwiseReport {
    /// Vertices changing label in each round.
    pub changed: Vec<usize>,
    pub trimmed: usize,
    /// Vertices silenced by the cap before the second round.
    pub capped: usize,
    /// Moves made by the final rebalancing.
    pub rebalanced: usize,
    /// Predicted error after each round, when a schedule was supplied.
    pub predicted: Option<[f64; 2]>,
}

#[derive(Clone, Debug)]
pub struct PairwiseOutcome {
    pub labeling: Labeling,
    pub report: PairwiseReport,
}

/// Two rounds of trimmed, capped argmax voting over community scores, then
/// rebalancing to exact sizes. Every vertex is relabeled each round; only
/// untrimmed, uncapped vertices influence the scores.
pub fn pairwise_boost(
    g: &Graph,
    z0: &Labeling,
    params: &SbmParams,
    cfg: &BoostConfig,
    schedule: Option<&BoostSchedule>,
) -> Result<PairwiseOutcome> {
    let (n, k) = (params.n(), params.k());
    if g.n() != n || z0.n() != n || z0.k() != k {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} vertices, labeling {} ({} communities), parameters {n} ({k})",
            g.n(),
            z0.n(),
            z0.k()
        )));
    }
    let density = params.d() / n as f64;
    let mask = trim_high_degree(g, cfg.trim_factor * params.d())?;
    let cap = cfg.vote_cap.map(|c| c * params.eps() * params.d()).filter(|&c| c > 0.0);
    let mut assign = z0.assign().to_vec();
    let mut influence = mask.keep().to_vec();
    let mut changed = Vec::with_capacity(2);
    let mut scores = Vec::new();
    for round in 0..2 {
        if !influence.iter().any(|&b| b) {
            return Err(Error::EmptyTrustedSet);
        }
        scores = community_scores(g, &assign, k, &influence, density);
        let next: Vec<usize> = (0..n).map(|u| argmax_keep(&scores[u * k..(u + 1) * k], assign[u])).collect();
        changed.push(next.iter().zip(&assign).filter(|(a, b)| a != b).count());
        assign = next;
        if round == 0 {
            if let Some(c) = cap {
                for u in 0..n {
                    let loudest = scores[u * k..(u + 1) * k].iter().fold(0.0_f64, |m, s| m.max(s.abs()));
                    if loudest > c {
                        influence[u] = false;
                    }
                }
            }
        }
    }
    let capped = mask.kept() - influence.iter().filter(|&&b| b).count();
    let before = assign.clone();
    rebalance_by_cost(&mut assign, k, n / k, |u, t| scores[u * k + before[u]] - scores[u * k + t]);
    let rebalanced = assign.iter().zip(&before).filter(|(a, b)| a != b).count();
    Ok(PairwiseOutcome {
        labeling: Labeling::new(assign, k)?,
        report: PairwiseReport {
            changed,
            trimmed: mask.trimmed(),
            capped,
            rebalanced,
            predicted: schedule.map(|s| [s.round1.beta, s.round2.beta]),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::derive;

    #[test]
    fn schedule_rejected_at_moderate_snr() {
        let p = SbmParams::new(1000, 2, 100.0, 1.0, 0.0).unwrap();
        let err = BoostSchedule::new(1000, 2, &derive(&p).unwrap()).unwrap_err();
        assert!(matches!(err, Error::ScheduleRejected(_)));
    }

    #[test]
    fn schedule_values_when_admissible() {
        let dq = DerivedQuantities { p1: 0.0, p2: 0.0, a: 0.0, b: 0.0, c: 10_000.0, delta_eta: 0.0, chi: 1.0 };
        let s = BoostSchedule::new(400, 2, &dq).unwrap();
        assert_eq!(s.round1.mu, 100.0);
        assert!((s.round2.gamma - 0.8).abs() < 1e-12);
        assert!((s.round2.beta - 10.0 * (-0.8 * 5000.0f64).exp()).abs() < 1e-300);
    }
}
