use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphgen::Graph;

/// Vertices kept after removing those of excessive degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrimMask {
    keep: Vec<bool>,
    threshold: f64,
}

impl TrimMask {
    pub fn full(n: usize) -> Self {
        Self { keep: vec![true; n], threshold: f64::INFINITY }
    }

    pub fn keep(&self) -> &[bool] {
        &self.keep
    }
    pub fn threshold(&self) -> f64 {
        self.threshold
    }
    pub fn is_kept(&self, u: usize) -> bool {
        self.keep[u]
    }
    pub fn kept(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }
    pub fn trimmed(&self) -> usize {
        self.keep.len() - self.kept()
    }
    pub fn trimmed_fraction(&self) -> f64 {
        self.trimmed() as f64 / self.keep.len().max(1) as f64
    }
}

/// Keeps exactly the vertices of degree at most `threshold`.
pub fn trim_high_degree(g: &Graph, threshold: f64) -> Result<TrimMask> {
    if !(threshold > 0.0) {
        return Err(Error::params(format!("trim threshold must be positive, got {threshold}")));
    }
    let keep = (0..g.n()).map(|u| g.degree(u) as f64 <= threshold).collect();
    Ok(TrimMask { keep, threshold })
}
