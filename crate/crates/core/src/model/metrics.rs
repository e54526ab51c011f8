use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;

use super::labeling::{Bisection, Labeling};
use crate::error::{Error, Result};

fn check_dims(hat: &Labeling, truth: &Labeling) -> Result<()> {
    if hat.n() != truth.n() || hat.k() != truth.k() {
        return Err(Error::DimensionMismatch(format!(
            "labelings have (n, k) = ({}, {}) and ({}, {})",
            hat.n(),
            hat.k(),
            truth.n(),
            truth.k()
        )));
    }
    Ok(())
}

/// `conf[j][c]` counts vertices with estimated label `j` and true label `c`.
pub fn confusion(hat: &Labeling, truth: &Labeling) -> Result<Vec<Vec<u64>>> {
    check_dims(hat, truth)?;
    let mut conf = vec![vec![0u64; hat.k()]; hat.k()];
    for (&j, &c) in hat.assign().iter().zip(truth.assign()) {
        conf[j][c] += 1;
    }
    Ok(conf)
}

/// Maximum total agreement over the rows `rows` and columns `cols`.
fn best_agreement(conf: &[Vec<u64>], rows: &[usize], cols: &[usize]) -> i64 {
    if rows.is_empty() {
        return 0;
    }
    let w = Matrix::from_fn(rows.len(), cols.len(), |(r, c)| conf[rows[r]][cols[c]] as i64);
    kuhn_munkres(&w).0
}

/// Bijection `π` with `π[j]` the true community matched to estimated
/// community `j`, maximising agreement. Among optimal bijections the
/// lexicographically smallest is returned.
pub fn align(hat: &Labeling, truth: &Labeling) -> Result<Vec<usize>> {
    let conf = confusion(hat, truth)?;
    let k = hat.k();
    let all: Vec<usize> = (0..k).collect();
    let optimum = best_agreement(&conf, &all, &all);
    let mut perm = Vec::with_capacity(k);
    let mut fixed = 0i64;
    let mut free: Vec<usize> = all.clone();
    for j in 0..k {
        let rest: Vec<usize> = (j + 1..k).collect();
        let chosen = free
            .iter()
            .copied()
            .find(|&c| {
                let cols: Vec<usize> = free.iter().copied().filter(|&x| x != c).collect();
                fixed + conf[j][c] as i64 + best_agreement(&conf, &rest, &cols) == optimum
            })
            .expect("an optimal completion always exists");
        fixed += conf[j][chosen] as i64;
        perm.push(chosen);
        free.retain(|&x| x != chosen);
    }
    Ok(perm)
}

/// Fraction of vertices misclassified under the best matching of community
/// labels, i.e. `min_π (1/2n) Σ_j ‖Ẑ(·,j) − Z(·,π(j))‖₁`.
pub fn error_k(hat: &Labeling, truth: &Labeling) -> Result<f64> {
    let conf = confusion(hat, truth)?;
    let all: Vec<usize> = (0..hat.k()).collect();
    let agree = best_agreement(&conf, &all, &all);
    Ok((hat.n() as i64 - agree) as f64 / hat.n().max(1) as f64)
}

/// `min_s (1/n_i) ‖x̂ − s·x°‖²` over global signs `s`, where `n_i` is the
/// common support size.
pub fn bisection_error(hat: &Bisection, truth: &Bisection) -> Result<f64> {
    if hat.n() != truth.n() || hat.x().iter().zip(truth.x()).any(|(a, b)| (*a == 0) != (*b == 0)) {
        return Err(Error::DimensionMismatch("bisections have different supports".into()));
    }
    let support = hat.support_size();
    if support == 0 {
        return Ok(0.0);
    }
    let disagree = hat.x().iter().zip(truth.x()).filter(|(a, b)| a != b).count();
    let mism = disagree.min(support - disagree);
    Ok(4.0 * mism as f64 / support as f64)
}

/// Sign-aligned mismatch fraction between an estimated bisection and the
/// closest balanced grouping of the true communities it cuts. The grouping
/// puts on the `+` side the `k/2` communities with the largest share of `+`
/// vertices in `hat` (restricted to its support).
pub fn bisection_mismatch(hat: &Bisection, truth: &Labeling) -> Result<f64> {
    if hat.n() != truth.n() {
        return Err(Error::DimensionMismatch("bisection and labeling differ in length".into()));
    }
    let k = truth.k();
    let mut plus = vec![0usize; k];
    let mut total = vec![0usize; k];
    for (u, &x) in hat.x().iter().enumerate() {
        if x != 0 {
            total[truth.label(u)] += 1;
            if x > 0 {
                plus[truth.label(u)] += 1;
            }
        }
    }
    let present: Vec<usize> = (0..k).filter(|&c| total[c] > 0).collect();
    let mut order = present.clone();
    order.sort_by(|&i, &j| {
        let fi = plus[i] as f64 / total[i] as f64;
        let fj = plus[j] as f64 / total[j] as f64;
        fj.total_cmp(&fi).then(i.cmp(&j))
    });
    let mut side = vec![false; k];
    for &c in order.iter().take(present.len() / 2) {
        side[c] = true;
    }
    let reference = Bisection::from_groups(truth, &side, Some(&hat.x().iter().map(|&x| x != 0).collect::<Vec<_>>()));
    Ok(bisection_error(hat, &reference)? / 4.0)
}
