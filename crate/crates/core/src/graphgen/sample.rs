use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Geometric};

use super::Graph;
use crate::error::{Error, Result};
use crate::model::{derive, Labeling, SbmParams};
use crate::seed;

/// Calls `f(t)` for every `t < len` that succeeds in an independent
/// Bernoulli(`p`) trial, using geometric skips so the cost is proportional
/// to the number of successes.
pub(crate) fn for_each_success<R: Rng>(len: usize, p: f64, rng: &mut R, mut f: impl FnMut(usize)) {
    if len == 0 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        (0..len).for_each(f);
        return;
    }
    let geo = Geometric::new(p).expect("p lies in (0, 1)");
    let mut t = 0u64;
    loop {
        t += geo.sample(rng);
        if t >= len as u64 {
            break;
        }
        f(t as usize);
        t += 1;
    }
}

/// Uniformly random balanced partition of `n` vertices into `k` parts.
pub fn balanced_partition<R: Rng>(n: usize, k: usize, rng: &mut R) -> Labeling {
    let mut assign: Vec<usize> = (0..n).map(|u| u * k / n).collect();
    assign.shuffle(rng);
    Labeling::new(assign, k).expect("ids below k")
}

/// Draws a graph from the block model together with its planted labeling.
pub fn sample_sbm(params: &SbmParams, seed: u64) -> Result<(Graph, Labeling)> {
    let dq = derive(params)?;
    let mut rng = seed::rng(seed);
    let (n, k) = (params.n(), params.k());
    let truth = balanced_partition(n, k, &mut rng);
    let mut members: Vec<Vec<u32>> = vec![Vec::with_capacity(n / k); k];
    for u in 0..n {
        members[truth.label(u)].push(u as u32);
    }
    let expected = (n as f64 * params.d() / 2.0 * 1.05) as usize + 16;
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(expected);
    for c in 0..k {
        let block = &members[c];
        for (i, &u) in block.iter().enumerate() {
            let rest = &block[i + 1..];
            for_each_success(rest.len(), dq.p1, &mut rng, |t| pairs.push((u, rest[t])));
        }
        for other in &members[c + 1..] {
            for &u in block {
                for_each_success(other.len(), dq.p2, &mut rng, |t| pairs.push((u, other[t])));
            }
        }
    }
    Ok((Graph::from_pairs(n, &pairs), truth))
}

/// Assigns every edge to the first part with probability `p` and to the
/// second otherwise.
pub fn split_graph(g: &Graph, p: f64, seed: u64) -> Result<(Graph, Graph)> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::params(format!("split probability must lie in (0, 1), got {p}")));
    }
    let mut rng = seed::rng(seed);
    let (mut first, mut second) = (Vec::new(), Vec::new());
    for (u, v) in g.edges() {
        let pair = (u as u32, v as u32);
        if rng.random::<f64>() < p {
            first.push(pair);
        } else {
            second.push(pair);
        }
    }
    Ok((Graph::from_pairs(g.n(), &first), Graph::from_pairs(g.n(), &second)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_is_balanced() {
        let mut rng = seed::rng(3);
        let l = balanced_partition(120, 4, &mut rng);
        assert!(l.is_balanced());
    }

    #[test]
    fn certain_edges_within_pairs() {
        // n=4, k=2, p1 = 1: each community of two vertices is one edge
        let p = SbmParams::new(4, 2, 8.0 / 3.0, 1.0, 0.0).unwrap();
        let dq = derive(&p).unwrap();
        assert!((dq.p1 - 1.0).abs() < 1e-12);
        let (g, truth) = sample_sbm(&p, 9).unwrap();
        for c in 0..2 {
            let m = truth.members(c);
            assert!(g.has_edge(m[0], m[1]));
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = SbmParams::new(400, 4, 20.0, 0.5, 0.0).unwrap();
        assert_eq!(sample_sbm(&p, 5).unwrap(), sample_sbm(&p, 5).unwrap());
        assert_ne!(sample_sbm(&p, 5).unwrap().0, sample_sbm(&p, 6).unwrap().0);
    }

    #[test]
    fn split_partitions_edges() {
        let p = SbmParams::new(300, 2, 20.0, 1.0, 0.0).unwrap();
        let (g, _) = sample_sbm(&p, 1).unwrap();
        let (a, b) = split_graph(&g, 0.7, 2).unwrap();
        assert_eq!(a.num_edges() + b.num_edges(), g.num_edges());
        for (u, v) in g.edges() {
            assert!(a.has_edge(u, v) ^ b.has_edge(u, v));
        }
        let (a, b) = split_graph(&Graph::empty(10), 0.5, 0).unwrap();
        assert_eq!(a.num_edges() + b.num_edges(), 0);
        assert!(split_graph(&g, 1.0, 0).is_err());
    }
}
