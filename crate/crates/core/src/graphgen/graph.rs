use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::model::parse_field;

/// Immutable simple undirected graph in compressed sparse row form. Each
/// adjacency list is sorted; every edge appears in both endpoint lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    nbrs: Vec<u32>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { offsets: vec![0; n + 1], nbrs: Vec::new() }
    }

    /// Builds a graph from unordered pairs, rejecting self-loops,
    /// out-of-range endpoints and repeated edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::params(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::params(format!("self-loop at vertex {u}")));
            }
            list.push((u.min(v) as u32, u.max(v) as u32));
        }
        let g = Self::from_pairs(n, &list);
        for u in 0..n {
            if g.neighbors(u).windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::params(format!("repeated edge at vertex {u}")));
            }
        }
        Ok(g)
    }

    /// Builds from pairs known to be valid and distinct.
    pub(crate) fn from_pairs(n: usize, pairs: &[(u32, u32)]) -> Self {
        let mut deg = vec![0usize; n + 1];
        for &(u, v) in pairs {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0;
        offsets.push(0);
        for &dg in deg.iter().take(n) {
            acc += dg;
            offsets.push(acc);
        }
        let mut fill = offsets.clone();
        let mut nbrs = vec![0u32; acc];
        for &(u, v) in pairs {
            nbrs[fill[u as usize]] = v;
            fill[u as usize] += 1;
            nbrs[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for u in 0..n {
            nbrs[offsets[u]..offsets[u + 1]].sort_unstable();
        }
        Self { offsets, nbrs }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.nbrs.len() / 2
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|u| self.degree(u)).collect()
    }

    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.nbrs[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u, v as usize))
        })
    }

    /// Subgraph induced on `vertices`; vertex `i` of the result is
    /// `vertices[i]` of `self`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut local = vec![u32::MAX; self.n()];
        for (i, &u) in vertices.iter().enumerate() {
            local[u] = i as u32;
        }
        let mut pairs = Vec::new();
        for (i, &u) in vertices.iter().enumerate() {
            for &v in self.neighbors(u) {
                let j = local[v as usize];
                if j != u32::MAX && (i as u32) < j {
                    pairs.push((i as u32, j));
                }
            }
        }
        Self::from_pairs(vertices.len(), &pairs)
    }

    /// Number of edges with both endpoints in the marked set.
    pub fn edges_within(&self, inside: &[bool]) -> usize {
        (0..self.n())
            .filter(|&u| inside[u])
            .map(|u| self.neighbors(u).iter().filter(|&&v| inside[v as usize]).count())
            .sum::<usize>()
            / 2
    }

    /// Writes the header `n m` then one `u v` line per edge with `u < v`.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.n(), self.num_edges())?;
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (n, m) = match lines.next() {
            Some((_, line)) => {
                let line = line?;
                let mut it = line.split_whitespace();
                (parse_field(it.next(), 1, "n")?, parse_field(it.next(), 1, "m")?)
            }
            None => return Err(Error::Parse { line: 1, msg: "missing header".into() }),
        };
        let mut edges = Vec::with_capacity(m);
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let u = parse_field(it.next(), i + 1, "endpoint")?;
            let v = parse_field(it.next(), i + 1, "endpoint")?;
            if u >= v {
                return Err(Error::Parse { line: i + 1, msg: format!("edge ({u}, {v}) must satisfy u < v") });
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse { line: edges.len() + 2, msg: format!("expected {m} edges, found {}", edges.len()) });
        }
        Self::from_edges(n, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_is_symmetric() {
        let g = Graph::from_edges(5, [(0, 1), (3, 1), (4, 2)]).unwrap();
        assert_eq!(g.num_edges(), 3);
        assert!(g.has_edge(1, 3) && g.has_edge(3, 1));
        assert!(!g.has_edge(0, 4));
        assert_eq!(g.degrees(), vec![1, 2, 1, 1, 1]);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 3), (2, 4)]);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::read_edge_list(&b"3 1\n2 1\n"[..]).is_err());
        assert!(Graph::read_edge_list(&b"3 2\n0 1\n"[..]).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::from_edges(6, [(0, 5), (1, 2), (2, 3), (0, 2)]).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(Graph::read_edge_list(&buf[..]).unwrap(), g);
    }

    #[test]
    fn induced_relabels() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let h = g.induced(&[4, 0, 1]);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(g.edges_within(&[true, true, true, false, false]), 2);
    }
}
