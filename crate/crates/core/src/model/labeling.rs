use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A hard assignment of `n` vertices to `k` communities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    assign: Vec<usize>,
    k: usize,
}

impl Labeling {
    pub fn new(assign: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::params("labeling needs k ≥ 1"));
        }
        if let Some((u, &c)) = assign.iter().enumerate().find(|(_, &c)| c >= k) {
            return Err(Error::params(format!("vertex {u} has community {c} ≥ k = {k}")));
        }
        Ok(Self { assign, k })
    }

    pub fn n(&self) -> usize {
        self.assign.len()
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn assign(&self) -> &[usize] {
        &self.assign
    }
    pub fn label(&self, u: usize) -> usize {
        self.assign[u]
    }
    pub fn into_vec(self) -> Vec<usize> {
        self.assign
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &c in &self.assign {
            s[c] += 1;
        }
        s
    }

    /// Exactly `n / k` vertices in every community.
    pub fn is_balanced(&self) -> bool {
        self.n() % self.k == 0 && self.sizes().iter().all(|&s| s == self.n() / self.k)
    }

    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.n()).filter(|&u| self.assign[u] == c).collect()
    }

    /// Relabel community `c` as `perm[c]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.k {
            return Err(Error::DimensionMismatch(format!("permutation of length {} for k = {}", perm.len(), self.k)));
        }
        Self::new(self.assign.iter().map(|&c| perm[c]).collect(), self.k)
    }

    /// One-hot membership matrix `Z ∈ {0,1}^{n×k}`.
    pub fn one_hot(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n(), self.k, |u, c| if self.assign[u] == c { 1.0 } else { 0.0 })
    }

    /// Centered membership matrix `ZZ⊤ − J/k`.
    pub fn centered_membership(&self) -> DMatrix<f64> {
        let kinv = 1.0 / self.k as f64;
        DMatrix::from_fn(self.n(), self.n(), |u, v| {
            (if self.assign[u] == self.assign[v] { 1.0 } else { 0.0 }) - kinv
        })
    }

    /// Writes the header line `n k` followed by one id per line.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.n(), self.k)?;
        for &c in &self.assign {
            writeln!(w, "{c}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (n, k) = match lines.next() {
            Some((_, line)) => {
                let line = line?;
                let mut it = line.split_whitespace();
                let n = parse_field(it.next(), 1, "n")?;
                let k = parse_field(it.next(), 1, "k")?;
                (n, k)
            }
            None => return Err(Error::Parse { line: 1, msg: "missing header".into() }),
        };
        let mut assign = Vec::with_capacity(n);
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            assign.push(parse_field(Some(line.trim()), i + 1, "community id")?);
        }
        if assign.len() != n {
            return Err(Error::Parse {
                line: assign.len() + 1,
                msg: format!("expected {n} labels, found {}", assign.len()),
            });
        }
        Self::new(assign, k)
    }
}

pub(crate) fn parse_field(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::Parse { line, msg: format!("missing {what}") })?;
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("invalid {what} `{tok}`") })
}

/// A signed split over a level's vertex set; `0` marks vertices outside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bisection {
    x: Vec<i8>,
}

impl Bisection {
    pub fn new(x: Vec<i8>) -> Result<Self> {
        if let Some(u) = x.iter().position(|v| !matches!(v, -1..=1)) {
            return Err(Error::params(format!("bisection entry {} at vertex {u} not in {{-1,0,1}}", x[u])));
        }
        Ok(Self { x })
    }

    /// `+1` on vertices whose community is in `plus`, `−1` on the other
    /// members of `support`, `0` elsewhere. `support = None` means all.
    pub fn from_groups(labels: &Labeling, plus: &[bool], support: Option<&[bool]>) -> Self {
        let x = (0..labels.n())
            .map(|u| match support {
                Some(s) if !s[u] => 0,
                _ if plus[labels.label(u)] => 1,
                _ => -1,
            })
            .collect();
        Self { x }
    }

    pub fn x(&self) -> &[i8] {
        &self.x
    }
    pub fn n(&self) -> usize {
        self.x.len()
    }
    pub fn support_size(&self) -> usize {
        self.x.iter().filter(|&&v| v != 0).count()
    }
    pub fn in_support(&self, u: usize) -> bool {
        self.x[u] != 0
    }
    pub fn into_vec(self) -> Vec<i8> {
        self.x
    }
}

/// Total order on `f64` for heap keys.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Key(f64);
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Greedy rebalancing to exactly `target` members per community. Vertices
/// leave oversized communities for undersized ones in order of increasing
/// `cost(u, to)`, the loss incurred by moving `u` from its current community
/// to `to`. Ties break by vertex and community index.
pub fn rebalance_by_cost<F>(assign: &mut [usize], k: usize, target: usize, cost: F)
where
    F: Fn(usize, usize) -> f64,
{
    assert_eq!(assign.len(), k * target, "rebalance needs n = k · target");
    let mut sizes = vec![0usize; k];
    for &c in assign.iter() {
        sizes[c] += 1;
    }
    if sizes.iter().all(|&s| s == target) {
        return;
    }
    let best_target = |u: usize, sizes: &[usize]| -> Option<(Key, usize)> {
        (0..k)
            .filter(|&t| sizes[t] < target)
            .map(|t| (Key(cost(u, t)), t))
            .min()
    };
    let mut heap = BinaryHeap::new();
    for (u, &c) in assign.iter().enumerate() {
        if sizes[c] > target {
            if let Some((key, t)) = best_target(u, &sizes) {
                heap.push(std::cmp::Reverse((key, u, t)));
            }
        }
    }
    while let Some(std::cmp::Reverse((_, u, t))) = heap.pop() {
        let c = assign[u];
        if sizes[c] <= target {
            continue;
        }
        if sizes[t] >= target {
            if let Some((key, t2)) = best_target(u, &sizes) {
                heap.push(std::cmp::Reverse((key, u, t2)));
            }
            continue;
        }
        assign[u] = t;
        sizes[c] -= 1;
        sizes[t] += 1;
    }
    debug_assert!(sizes.iter().all(|&s| s == target));
}
