use serde::Serialize;

use super::analytic::LevelParams;
use crate::error::{Error, Result};
use crate::graphgen::Graph;
use crate::model::{derive, Bisection, SbmParams};
use crate::spectral::{center, SymmetricOperator, TrimMask};

/// Result of comparing every prefix of sorted vote margins with the voting
/// lower bound `coef · (m − offset)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginReport {
    /// Set when the instance lies outside the statement's hypotheses.
    pub skipped: Option<String>,
    /// The within-community rate is below 400, where the statement's
    /// constants are not claimed.
    pub below_degree_floor: bool,
    /// Whether the mask keeps at least `(1 − e^{−2C}) n` vertices.
    pub mask_large_enough: bool,
    pub rho: f64,
    pub coef: f64,
    pub offset: f64,
    pub sizes_checked: usize,
    pub violations: usize,
    /// `min_m (sum of the m smallest margins − bound(m))`.
    pub worst_slack: f64,
    pub worst_size: usize,
    pub min_margin: f64,
    pub total_margin: f64,
}

impl MarginReport {
    fn skipped(reason: &str) -> Self {
        Self {
            skipped: Some(reason.to_string()),
            below_degree_floor: false,
            mask_large_enough: true,
            rho: f64::NAN,
            coef: f64::NAN,
            offset: f64::NAN,
            sizes_checked: 0,
            violations: 0,
            worst_slack: f64::NAN,
            worst_size: 0,
            min_margin: f64::NAN,
            total_margin: f64::NAN,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Margins `(Ḡy)_u · y_u` over the support of `y`, where `Ḡ` is centered at
/// the model degree and restricted to `mask`.
pub fn vote_margins(g: &Graph, y: &Bisection, d: f64, mask: Option<&TrimMask>) -> Vec<f64> {
    let op = center(g, d, mask);
    let x: Vec<f64> = y.x().iter().map(|&v| v as f64).collect();
    let mut gy = vec![0.0; g.n()];
    op.apply(&x, &mut gy);
    (0..g.n()).filter(|&u| y.in_support(u)).map(|u| gy[u] * x[u]).collect()
}

fn judge(mut margins: Vec<f64>, coef: f64, offset: f64) -> (usize, f64, usize, f64, f64) {
    margins.sort_by(|a, b| a.total_cmp(b));
    let mut prefix = 0.0;
    let (mut violations, mut worst, mut worst_m) = (0, f64::INFINITY, 0);
    for (i, m) in margins.iter().enumerate() {
        prefix += m;
        let size = i + 1;
        let slack = prefix - coef * (size as f64 - offset);
        if slack < 0.0 {
            violations += 1;
        }
        if slack < worst {
            worst = slack;
            worst_m = size;
        }
    }
    (violations, worst, worst_m, margins.first().copied().unwrap_or(0.0), prefix)
}

fn assemble(
    g: &Graph,
    y: &Bisection,
    params: &SbmParams,
    gamma: f64,
    mask: Option<&TrimMask>,
    rho: f64,
    scale_n: usize,
) -> Result<MarginReport> {
    if g.n() != params.n() || y.n() != params.n() {
        return Err(Error::DimensionMismatch("graph, bisection and parameters disagree on n".into()));
    }
    let dq = derive(params)?;
    let k = params.k() as f64;
    let (denom, mult) = if mask.is_some() { (16.0, 640.0) } else { (8.0, 96.0) };
    let coef = (1.0 - gamma) * params.eps() * params.d() / (denom * k);
    let offset = mult * rho * k * scale_n as f64 / (1.0 - gamma);
    let margins = vote_margins(g, y, params.d(), mask);
    let sizes = margins.len();
    let (violations, worst_slack, worst_size, min_margin, total_margin) = judge(margins, coef, offset);
    let mask_large_enough = mask.is_none_or(|m| m.kept() as f64 >= (1.0 - dq.rho()) * params.n() as f64);
    Ok(MarginReport {
        skipped: None,
        below_degree_floor: dq.a < 400.0,
        mask_large_enough,
        rho,
        coef,
        offset,
        sizes_checked: sizes,
        violations,
        worst_slack,
        worst_size,
        min_margin,
        total_margin,
    })
}

/// Falsification test of the level-bisection voting lower bound. For each
/// `m`, the smallest value of `⟨Ḡy ⊙ y, z⟩` over `z ∈ {0,1}^n` with
/// `‖z‖₁ = m` is the sum of the `m` smallest margins, so comparing those
/// prefix sums with `((1−γ)εd/8k)(m − 96ρ_γ k n_i/(1−γ))` checks the bound
/// for every `z` at once. With a mask the constants become `16k` and `640`.
pub fn worst_margin_check(
    g: &Graph,
    y: &Bisection,
    params: &SbmParams,
    level: &LevelParams,
    gamma: f64,
    mask: Option<&TrimMask>,
) -> Result<MarginReport> {
    if params.eps() == 0.0 {
        return Ok(MarginReport::skipped("eps = 0: no planted signal, outside the statement's hypotheses"));
    }
    if !(0.0..=0.99).contains(&gamma) {
        return Err(Error::params(format!("gamma must lie in [0, 0.99], got {gamma}")));
    }
    if y.support_size() != level.n_i {
        return Err(Error::DimensionMismatch(format!(
            "level-{} bisection must cover {} vertices, covers {}",
            level.i,
            level.n_i,
            y.support_size()
        )));
    }
    let rho = (-gamma * level.beta * level.c_tilde / 2.0).exp();
    assemble(g, y, params, gamma, mask, rho, level.n_i)
}

/// The same falsification test for a pair of communities, with
/// `ρ_γ = exp(−γC/k)` and the full vertex count in the offset.
pub fn pairwise_margin_check(
    g: &Graph,
    y: &Bisection,
    params: &SbmParams,
    gamma: f64,
    mask: Option<&TrimMask>,
) -> Result<MarginReport> {
    if params.eps() == 0.0 {
        return Ok(MarginReport::skipped("eps = 0: no planted signal, outside the statement's hypotheses"));
    }
    let dq = derive(params)?;
    let k = params.k() as f64;
    let rho = (-gamma * dq.c / k).exp();
    assemble(g, y, params, gamma, mask, rho, params.n())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::sample_sbm;
    use crate::stats::level_params;

    #[test]
    fn prefix_bound_bookkeeping() {
        let (v, worst, at, min, total) = judge(vec![3.0, -1.0, 2.0], 1.0, 0.0);
        // prefixes: -1, 1, 4 against bounds 1, 2, 3
        assert_eq!(v, 2);
        assert_eq!((worst, at, min, total), (-2.0, 1, -1.0, 4.0));
    }

    #[test]
    fn skip_without_signal() {
        let p = SbmParams::new(64, 2, 8.0, 0.0, 0.0).unwrap();
        let (g, t) = sample_sbm(&p, 1).unwrap();
        let y = Bisection::from_groups(&t, &[true, false], None);
        let l = level_params(1, &p).unwrap();
        assert!(worst_margin_check(&g, &y, &p, &l, 0.0, None).unwrap().skipped.is_some());
    }
}
