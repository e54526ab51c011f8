use nalgebra::{DMatrix, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::SymmetricOperator;
use crate::error::{Error, Result};
use crate::seed;

/// Extreme-eigenvalue estimate of a symmetric operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    /// Never exceeds the true spectral norm.
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Leading eigenpairs, largest eigenvalue first.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// One unit vector per eigenvalue.
    pub vectors: Vec<Vec<f64>>,
    /// `‖M v − θ v‖` for each pair.
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Ritz pairs of the current Krylov space, eigenvalues ascending.
struct Ritz {
    values: Vec<f64>,
    coords: DMatrix<f64>,
    residuals: Vec<f64>,
}

impl Ritz {
    fn scale(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Two passes of classical Gram–Schmidt against `basis`.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(w, q);
            w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
        }
    }
}

fn random_unit(n: usize, basis: &[Vec<f64>], rng: &mut rand_chacha::ChaCha8Rng) -> Option<Vec<f64>> {
    for _ in 0..3 {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let before = norm(&v);
        orthogonalize(&mut v, basis);
        let after = norm(&v);
        if after > 1e-8 * before {
            v.iter_mut().for_each(|x| *x /= after);
            return Some(v);
        }
    }
    None
}

fn ritz(alpha: &[f64], beta: &[f64]) -> Result<Ritz> {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::try_new(t, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen("tridiagonal eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let tail = beta.get(m - 1).copied().unwrap_or(0.0).abs();
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let coords = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
    let residuals = (0..m).map(|c| tail * coords[(m - 1, c)].abs()).collect();
    Ok(Ritz { values, coords, residuals })
}

/// Lanczos with full reorthogonalisation. `stop` is consulted on the Ritz
/// pairs every few steps; the run ends when it returns true, the Krylov
/// space exhausts the dimension, or `max_steps` is reached.
fn lanczos<M, F>(op: &M, max_steps: usize, seed: u64, mut stop: F) -> Result<(Vec<Vec<f64>>, Ritz, bool)>
where
    M: SymmetricOperator + ?Sized,
    F: FnMut(&Ritz) -> bool,
{
    let n = op.dim();
    if n == 0 {
        return Err(Error::params("operator has dimension 0"));
    }
    let steps = max_steps.clamp(1, n);
    let mut rng = seed::rng(seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps.min(512));
    basis.push(random_unit(n, &[], &mut rng).expect("nonzero random vector"));
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut w = vec![0.0; n];
    let mut scale = 0.0_f64;
    loop {
        let j = basis.len() - 1;
        op.apply(&basis[j], &mut w);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        orthogonalize(&mut w, &basis);
        let b = norm(&w);
        scale = scale.max(a.abs()).max(b);
        let m = alpha.len();
        let breakdown = b <= 1e-10 * scale.max(f64::MIN_POSITIVE);
        let exhausted = m == steps;
        let next = if breakdown || exhausted {
            None
        } else {
            Some(w.iter().map(|x| x / b).collect::<Vec<f64>>())
        };
        beta.push(if breakdown { 0.0 } else { b });
        if m % 5 == 0 || breakdown || exhausted {
            let r = ritz(&alpha, &beta)?;
            if stop(&r) {
                return Ok((basis, r, true));
            }
            if exhausted {
                return Ok((basis, r, false));
            }
        }
        match next {
            Some(q) => basis.push(q),
            None => match random_unit(n, &basis, &mut rng) {
                Some(q) => {
                    basis.push(q);
                }
                None => {
                    let r = ritz(&alpha, &beta)?;
                    let done = stop(&r);
                    return Ok((basis, r, done));
                }
            },
        }
    }
}

/// Estimates `‖M‖` as the largest-magnitude Ritz value, stopping once its
/// residual is at most `tol · |θ|`.
pub fn spectral_norm<M>(op: &M, tol: f64, max_iters: usize, seed: u64) -> Result<NormEstimate>
where
    M: SymmetricOperator + ?Sized,
{
    if !(tol > 0.0) {
        return Err(Error::params("tol must be positive"));
    }
    let (_, r, converged) = lanczos(op, max_iters, seed, |r| {
        let i = extreme_index(r);
        r.residuals[i] <= tol * r.values[i].abs().max(f64::MIN_POSITIVE) || r.scale() == 0.0
    })?;
    let converged = converged || r.values.len() == op.dim();
    Ok(NormEstimate {
        value: r.values[extreme_index(&r)].abs(),
        converged,
        iterations: r.values.len(),
    })
}

fn ritz_vector(basis: &[Vec<f64>], ritz: &Ritz, c: usize) -> Vec<f64> {
    let mut v = vec![0.0; basis[0].len()];
    for (row, q) in basis.iter().enumerate().take(ritz.values.len()) {
        let coef = ritz.coords[(row, c)];
        v.iter_mut().zip(q).for_each(|(vi, qi)| *vi += coef * qi);
    }
    let len = norm(&v);
    v.iter_mut().for_each(|x| *x /= len);
    v
}

fn extreme_index(r: &Ritz) -> usize {
    let hi = r.values.len() - 1;
    if r.values[0].abs() > r.values[hi].abs() {
        0
    } else {
        hi
    }
}

/// The eigenpair of largest magnitude; `value` keeps its sign.
#[derive(Clone, Debug)]
pub struct ExtremePair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Like [`spectral_norm`] but also returns the Ritz vector.
pub fn extreme_eigpair<M>(op: &M, tol: f64, max_iters: usize, seed: u64) -> Result<ExtremePair>
where
    M: SymmetricOperator + ?Sized,
{
    if !(tol > 0.0) {
        return Err(Error::params("tol must be positive"));
    }
    let (basis, r, converged) = lanczos(op, max_iters, seed, |r| {
        let i = extreme_index(r);
        r.residuals[i] <= tol * r.values[i].abs().max(f64::MIN_POSITIVE) || r.scale() == 0.0
    })?;
    let i = extreme_index(&r);
    Ok(ExtremePair {
        value: r.values[i],
        vector: ritz_vector(&basis, &r, i),
        converged: converged || r.values.len() == op.dim(),
        iterations: r.values.len(),
    })
}

/// The `r` algebraically largest eigenpairs. Each returned pair has residual
/// at most `tol · ‖M‖` when `converged` is set.
pub fn top_eigvecs<M>(op: &M, r: usize, tol: f64, max_iters: usize, seed: u64) -> Result<EigenPairs>
where
    M: SymmetricOperator + ?Sized,
{
    let n = op.dim();
    if r == 0 || r > n {
        return Err(Error::params(format!("requested {r} eigenvectors of a {n}-dimensional operator")));
    }
    if !(tol > 0.0) {
        return Err(Error::params("tol must be positive"));
    }
    let budget = max_iters.max(r).min(n);
    let (basis, ritz, converged) = lanczos(op, budget, seed, |rz| {
        let m = rz.values.len();
        m >= r && {
            let s = rz.scale();
            (m - r..m).all(|i| rz.residuals[i] <= tol * s)
        }
    })?;
    let m = ritz.values.len();
    let take = r.min(m);
    let mut values = Vec::with_capacity(take);
    let mut vectors = Vec::with_capacity(take);
    let mut residuals = Vec::with_capacity(take);
    for c in (m - take..m).rev() {
        values.push(ritz.values[c]);
        vectors.push(ritz_vector(&basis, &ritz, c));
        residuals.push(ritz.residuals[c]);
    }
    Ok(EigenPairs {
        values,
        vectors,
        residuals,
        converged: converged && take == r,
        iterations: m,
    })
}
