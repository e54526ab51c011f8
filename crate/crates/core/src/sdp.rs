//! First-order solver for the basic semidefinite relaxation
//! `max ⟨Ḡ, M⟩ s.t. M ⪰ 0, M_ii = 1, 0 ≤ M_ij ≤ 1, M1 = (n/k)1`.
//!
//! The three constraint sets are handled by consensus ADMM: each iteration
//! projects onto the PSD cone (with the linear objective folded in), the
//! box with unit diagonal, and the row-sum affine space, then averages.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::CenteredMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SdpConfig {
    pub tol: f64,
    pub max_iters: usize,
    /// Initial penalty; `None` means `1/√n`.
    pub rho: Option<f64>,
}

impl Default for SdpConfig {
    fn default() -> Self {
        Self { tol: 1e-6, max_iters: 2000, rho: None }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub m: DMatrix<f64>,
    /// Graph vertex of each row of `m`.
    pub vertices: Vec<usize>,
    pub objective: f64,
    /// `max(‖X − M‖_F, max_i |Σ_j M_ij − n/k|)` with `X` the PSD block.
    pub primal_residual: f64,
    /// Penalty-scaled change of the consensus iterate relative to `‖Ḡ‖_F`.
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best objective among near-feasible iterates, recorded whenever it
    /// improves.
    pub objective_trace: Vec<f64>,
}

/// Frobenius-nearest positive semidefinite matrix (eigenvalues clipped at 0).
pub fn psd_project(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = s.nrows();
    if n != s.ncols() {
        return Err(Error::DimensionMismatch("PSD projection needs a square matrix".into()));
    }
    let sym = (s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, 1e-14, 0).ok_or_else(|| Error::Eigen("symmetric eigensolver failed".into()))?;
    let mut v = eig.eigenvectors;
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let w = lam.max(0.0).sqrt();
        v.column_mut(j).scale_mut(w);
    }
    Ok(&v * v.transpose())
}

fn project_box(mut s: DMatrix<f64>) -> DMatrix<f64> {
    s.apply(|x| *x = x.clamp(0.0, 1.0));
    s.fill_diagonal(1.0);
    s
}

/// Projects a symmetric matrix onto `{W symmetric : W1 = c1}` by
/// subtracting `w1⊤ + 1w⊤`.
fn project_row_sums(mut s: DMatrix<f64>, c: f64) -> DMatrix<f64> {
    let n = s.nrows();
    let nf = n as f64;
    let r: Vec<f64> = (0..n).map(|i| s.row(i).sum() - c).collect();
    let shift = r.iter().sum::<f64>() / (2.0 * nf);
    let w: Vec<f64> = r.iter().map(|ri| (ri - shift) / nf).collect();
    for j in 0..n {
        for i in 0..n {
            s[(i, j)] -= w[i] + w[j];
        }
    }
    s
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Solves the relaxation for the dense objective `gbar` over `k` blocks.
pub fn solve_sdp_dense(gbar: &DMatrix<f64>, k: usize, cfg: &SdpConfig) -> Result<SdpSolution> {
    let n = gbar.nrows();
    if n == 0 || n != gbar.ncols() {
        return Err(Error::DimensionMismatch("objective must be a nonempty square matrix".into()));
    }
    if k < 2 || k > n {
        return Err(Error::params(format!("need 2 ≤ k ≤ n, got k={k}, n={n}")));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::params("tol must be positive"));
    }
    let nf = n as f64;
    let target = nf / k as f64;
    let g_norm = gbar.norm().max(1.0);
    let mut rho = cfg.rho.unwrap_or(1.0 / nf.sqrt());
    let accept = cfg.tol.max(1e-3) * target.max(1.0);

    let mut z = DMatrix::from_element(n, n, 1.0 / k as f64);
    z.fill_diagonal(1.0);
    let mut u = [DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n)];
    let mut best: Option<(f64, DMatrix<f64>, f64, f64)> = None;
    let mut trace = Vec::new();
    let (mut primal, mut dual) = (f64::INFINITY, f64::INFINITY);
    let mut last_y = z.clone();
    let mut iterations = 0;
    let mut converged = false;

    for it in 1..=cfg.max_iters {
        iterations = it;
        let x = psd_project(&(&z - &u[0] + gbar / rho))?;
        let y = project_box(&z - &u[1]);
        let w = project_row_sums(&z - &u[2], target);
        let z_new = (&x + &u[0] + &y + &u[1] + &w + &u[2]) / 3.0;
        u[0] += &x - &z_new;
        u[1] += &y - &z_new;
        u[2] += &w - &z_new;
        let row_err = (0..n).map(|i| (y.row(i).sum() - target).abs()).fold(0.0, f64::max);
        primal = (&x - &y).norm().max(row_err);
        dual = rho * 3f64.sqrt() * (&z_new - &z).norm() / g_norm;
        z = z_new;

        let objective = inner(gbar, &y);
        if primal <= accept && best.as_ref().is_none_or(|b| objective > b.0) {
            trace.push(objective);
            best = Some((objective, y.clone(), primal, dual));
        }
        last_y = y;
        if primal <= cfg.tol && dual <= cfg.tol {
            converged = true;
            break;
        }
        // residual balancing
        let dual_abs = dual * g_norm;
        if primal > 10.0 * dual_abs {
            rho *= 2.0;
            u.iter_mut().for_each(|m| *m /= 2.0);
        } else if dual_abs > 10.0 * primal {
            rho /= 2.0;
            u.iter_mut().for_each(|m| *m *= 2.0);
        }
    }

    let (m, primal_residual, dual_residual) = match (converged, best) {
        (false, Some((_, m, p, d))) => (m, p, d),
        _ => (last_y, primal, dual),
    };
    Ok(SdpSolution {
        objective: inner(gbar, &m),
        m,
        vertices: (0..n).collect(),
        primal_residual,
        dual_residual,
        iterations,
        converged,
        objective_trace: trace,
    })
}

/// Solves the relaxation for a centered adjacency operator over its masked
/// vertices.
pub fn solve_basic_sdp(gbar: &CenteredMatrix<'_>, k: usize, tol: f64, max_iters: usize) -> Result<SdpSolution> {
    let (dense, kept) = gbar.to_dense_masked();
    let mut sol = solve_sdp_dense(&dense, k, &SdpConfig { tol, max_iters, rho: None })?;
    sol.vertices = kept;
    Ok(sol)
}
