use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use serde::Serialize;

use super::sample::for_each_success;
use super::Graph;
use crate::error::{Error, Result};
use crate::model::{derive, Labeling, SbmParams};
use crate::seed;

/// How corrupted vertices rewire their incident edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Strategy {
    /// Fresh Bernoulli(d/n) edges to every other vertex.
    RandomRewire,
    /// A random half `T` of the vertices is targeted; each corrupted vertex
    /// links to vertices of `T` whose true label differs from its own.
    /// `budget = None` links to all of them, otherwise to `budget` chosen
    /// uniformly at random.
    VotePoison { budget: Option<usize> },
    /// Edges at the across-community rate inside the vertex's own community
    /// and at the within-community rate towards community `c + 1 mod k`.
    ClusterDisguise,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::RandomRewire => "random_rewire",
            Strategy::VotePoison { .. } => "vote_poison",
            Strategy::ClusterDisguise => "cluster_disguise",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random_rewire" => Ok(Strategy::RandomRewire),
            "vote_poison" => Ok(Strategy::VotePoison { budget: None }),
            "cluster_disguise" => Ok(Strategy::ClusterDisguise),
            other => Err(Error::UnknownStrategy(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorruptionReport {
    /// Sorted corrupted vertices, `⌊η n⌋` of them.
    pub corrupted: Vec<usize>,
    pub strategy: Strategy,
    /// The targeted half for vote poisoning, sorted; empty otherwise.
    pub targets: Vec<usize>,
}

/// Replaces every edge incident to `⌊η n⌋` uniformly chosen vertices
/// according to `strategy`. Edges between two uncorrupted vertices are
/// never touched.
pub fn corrupt(
    g: &Graph,
    truth: &Labeling,
    params: &SbmParams,
    strategy: Strategy,
    seed: u64,
) -> Result<(Graph, CorruptionReport)> {
    let n = g.n();
    if truth.n() != n || params.n() != n {
        return Err(Error::DimensionMismatch("graph, labeling and parameters disagree on n".into()));
    }
    let count = (params.eta() * n as f64).floor() as usize;
    if count == 0 {
        let report = CorruptionReport { corrupted: Vec::new(), strategy, targets: Vec::new() };
        return Ok((g.clone(), report));
    }
    let dq = derive(params)?;
    let mut rng = seed::rng(seed);
    let mut corrupted = index::sample(&mut rng, n, count).into_vec();
    corrupted.sort_unstable();
    let mut is_bad = vec![false; n];
    for &u in &corrupted {
        is_bad[u] = true;
    }

    let mut pairs: Vec<(u32, u32)> = g
        .edges()
        .filter(|&(u, v)| !is_bad[u] && !is_bad[v])
        .map(|(u, v)| (u as u32, v as u32))
        .collect();
    let honest = pairs.len();
    let mut push = |u: usize, v: usize| {
        if u != v {
            pairs.push((u.min(v) as u32, u.max(v) as u32));
        }
    };

    let mut targets = Vec::new();
    match strategy {
        Strategy::RandomRewire => {
            let p = params.d() / n as f64;
            for &u in &corrupted {
                for_each_success(n, p, &mut rng, |v| {
                    if !(is_bad[v] && v < u) {
                        push(u, v)
                    }
                });
            }
        }
        Strategy::VotePoison { budget } => {
            targets = index::sample(&mut rng, n, n / 2).into_vec();
            targets.sort_unstable();
            for &u in &corrupted {
                let own = truth.label(u);
                let pool: Vec<usize> = targets.iter().copied().filter(|&v| truth.label(v) != own).collect();
                match budget {
                    Some(b) if b < pool.len() => {
                        for i in index::sample(&mut rng, pool.len(), b) {
                            push(u, pool[i]);
                        }
                    }
                    _ => pool.iter().for_each(|&v| push(u, v)),
                }
            }
        }
        Strategy::ClusterDisguise => {
            let k = truth.k();
            let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
            for v in 0..n {
                members[truth.label(v)].push(v);
            }
            for &u in &corrupted {
                let c = truth.label(u);
                let lure = (c + 1) % k;
                for (t, block) in members.iter().enumerate() {
                    let p = if t == lure { dq.p1 } else { dq.p2 };
                    for_each_success(block.len(), p, &mut rng, |i| {
                        let v = block[i];
                        if !(is_bad[v] && v < u) {
                            push(u, v)
                        }
                    });
                }
            }
        }
    }
    pairs[honest..].sort_unstable();
    let mut tail = pairs.split_off(honest);
    tail.dedup();
    pairs.extend(tail);
    let out = Graph::from_pairs(n, &pairs);

    for u in (0..n).filter(|&u| !is_bad[u]) {
        let before = g.neighbors(u).iter().filter(|&&v| !is_bad[v as usize]);
        let after = out.neighbors(u).iter().filter(|&&v| !is_bad[v as usize]);
        assert!(before.eq(after), "corruption altered an edge between honest vertices at {u}");
    }
    Ok((out, CorruptionReport { corrupted, strategy, targets }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::sample_sbm;

    fn setup(eta: f64) -> (Graph, Labeling, SbmParams) {
        let p = SbmParams::new(400, 2, 20.0, 1.0, eta).unwrap();
        let (g, t) = sample_sbm(&p, 11).unwrap();
        (g, t, p)
    }

    #[test]
    fn zero_budget_is_identity() {
        let (g, t, p) = setup(0.0);
        let (h, rep) = corrupt(&g, &t, &p, Strategy::RandomRewire, 1).unwrap();
        assert_eq!(h, g);
        assert!(rep.corrupted.is_empty());
    }

    #[test]
    fn changes_are_local() {
        let (g, t, p) = setup(0.05);
        for s in [Strategy::RandomRewire, Strategy::VotePoison { budget: Some(40) }, Strategy::ClusterDisguise] {
            let (h, rep) = corrupt(&g, &t, &p, s, 2).unwrap();
            assert_eq!(rep.corrupted.len(), 20);
            let bad: Vec<bool> = (0..400).map(|u| rep.corrupted.binary_search(&u).is_ok()).collect();
            for (u, v) in g.edges().chain(h.edges()) {
                if g.has_edge(u, v) != h.has_edge(u, v) {
                    assert!(bad[u] || bad[v]);
                }
            }
        }
    }

    #[test]
    fn poison_targets_opposite_labels() {
        let (g, t, p) = setup(0.01);
        let (h, rep) = corrupt(&g, &t, &p, Strategy::VotePoison { budget: None }, 3).unwrap();
        assert_eq!(rep.targets.len(), 200);
        for &u in &rep.corrupted {
            let expected = rep.targets.iter().filter(|&&v| t.label(v) != t.label(u)).count();
            assert!(h.degree(u) >= expected && h.degree(u) <= expected + rep.corrupted.len());
        }
    }

    #[test]
    fn strategy_names_parse() {
        for s in ["random_rewire", "vote_poison", "cluster_disguise"] {
            assert_eq!(s.parse::<Strategy>().unwrap().name(), s);
        }
        assert!(matches!("bogus".parse::<Strategy>(), Err(Error::UnknownStrategy(_))));
    }
}
