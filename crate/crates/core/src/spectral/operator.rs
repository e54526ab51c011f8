use nalgebra::DMatrix;

use super::TrimMask;
use crate::graphgen::Graph;
use crate::model::Labeling;

/// A real symmetric linear map accessed through products only.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;
    /// Writes `M x` into `y`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let prod = self * nalgebra::DVector::from_column_slice(x);
        y.copy_from_slice(prod.as_slice());
    }
}

/// `−M` for any operator `M`.
pub struct Negated<'a, M: ?Sized>(pub &'a M);

impl<M: SymmetricOperator + ?Sized> SymmetricOperator for Negated<'_, M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply(x, y);
        y.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Adjacency minus a constant density, restricted to `mask × mask`, with
/// zero diagonal: entry `(i, j)` is `1 − c` on edges and `−c` on non-edges.
#[derive(Clone, Debug)]
pub struct CenteredMatrix<'g> {
    graph: &'g Graph,
    density: f64,
    mask: Vec<bool>,
}

/// Centers `g` at degree `d`, i.e. at density `d / n`.
pub fn center<'g>(g: &'g Graph, d: f64, mask: Option<&TrimMask>) -> CenteredMatrix<'g> {
    CenteredMatrix::with_density(g, d / g.n().max(1) as f64, mask.map(|m| m.keep().to_vec()))
}

impl<'g> CenteredMatrix<'g> {
    pub fn with_density(graph: &'g Graph, density: f64, mask: Option<Vec<bool>>) -> Self {
        let mask = mask.unwrap_or_else(|| vec![true; graph.n()]);
        assert_eq!(mask.len(), graph.n(), "mask length must equal vertex count");
        Self { graph, density, mask }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }
    pub fn density(&self) -> f64 {
        self.density
    }
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Dense materialisation, for small instances and tests.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.graph.n();
        let mut m = DMatrix::zeros(n, n);
        for i in (0..n).filter(|&i| self.mask[i]) {
            for j in (0..n).filter(|&j| j != i && self.mask[j]) {
                m[(i, j)] = -self.density;
            }
            for &j in self.graph.neighbors(i) {
                if self.mask[j as usize] {
                    m[(i, j as usize)] += 1.0;
                }
            }
        }
        m
    }

    /// Dense matrix over the masked vertices only, with their indices.
    pub fn to_dense_masked(&self) -> (DMatrix<f64>, Vec<usize>) {
        let kept: Vec<usize> = (0..self.graph.n()).filter(|&i| self.mask[i]).collect();
        let mut local = vec![usize::MAX; self.graph.n()];
        for (a, &u) in kept.iter().enumerate() {
            local[u] = a;
        }
        let m = kept.len();
        let mut out = DMatrix::from_element(m, m, -self.density);
        for (a, &u) in kept.iter().enumerate() {
            out[(a, a)] = 0.0;
            for &v in self.graph.neighbors(u) {
                let b = local[v as usize];
                if b != usize::MAX {
                    out[(a, b)] += 1.0;
                }
            }
        }
        (out, kept)
    }
}

impl SymmetricOperator for CenteredMatrix<'_> {
    fn dim(&self) -> usize {
        self.graph.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let total: f64 = x.iter().zip(&self.mask).filter(|(_, &m)| m).map(|(v, _)| v).sum();
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = if self.mask[i] {
                let s: f64 = self
                    .graph
                    .neighbors(i)
                    .iter()
                    .filter(|&&j| self.mask[j as usize])
                    .map(|&j| x[j as usize])
                    .sum();
                s - self.density * (total - x[i])
            } else {
                0.0
            };
        }
    }
}

/// The centered matrix minus its planted expectation `(εd/n)(ZZ⊤ − J/k)`,
/// both restricted to the mask and with zero diagonal.
pub struct PlantedResidual<'a> {
    centered: &'a CenteredMatrix<'a>,
    truth: &'a Labeling,
    signal: f64,
}

impl<'a> PlantedResidual<'a> {
    /// `signal` is the entrywise scale `εd / n`.
    pub fn new(centered: &'a CenteredMatrix<'a>, truth: &'a Labeling, signal: f64) -> Self {
        assert_eq!(centered.dim(), truth.n());
        Self { centered, truth, signal }
    }
}

impl SymmetricOperator for PlantedResidual<'_> {
    fn dim(&self) -> usize {
        self.centered.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.centered.apply(x, y);
        let mask = self.centered.mask();
        let k = self.truth.k();
        let mut block = vec![0.0; k];
        let mut total = 0.0;
        for (u, &v) in x.iter().enumerate() {
            if mask[u] {
                block[self.truth.label(u)] += v;
                total += v;
            }
        }
        let kinv = 1.0 / k as f64;
        for (u, yu) in y.iter_mut().enumerate() {
            if mask[u] {
                let same = block[self.truth.label(u)] - x[u];
                let all = total - x[u];
                *yu -= self.signal * (same - kinv * all);
            }
        }
    }
}
