//! Centered neighbourhood votes shared by refinement and boosting.

use crate::graphgen::Graph;

/// Per-community vote scores: `score[u·k + a] = |N(u) ∩ I ∩ V_a| −
/// c · |I ∩ V_a ∖ {u}|`, i.e. `(Ḡ Z)_{u,a}` restricted to the influencing
/// set `I`, for the centering density `c`.
pub fn community_scores(g: &Graph, assign: &[usize], k: usize, influence: &[bool], density: f64) -> Vec<f64> {
    let n = g.n();
    let mut counts = vec![0usize; k];
    for u in (0..n).filter(|&u| influence[u]) {
        counts[assign[u]] += 1;
    }
    let mut scores = vec![0.0; n * k];
    let mut local = vec![0usize; k];
    for u in 0..n {
        local.iter_mut().for_each(|c| *c = 0);
        for &v in g.neighbors(u) {
            let v = v as usize;
            if influence[v] {
                local[assign[v]] += 1;
            }
        }
        let row = &mut scores[u * k..(u + 1) * k];
        for a in 0..k {
            let others = counts[a] - usize::from(influence[u] && assign[u] == a);
            row[a] = local[a] as f64 - density * others as f64;
        }
    }
    scores
}

/// Label with the highest score; a tie that includes `current` keeps it,
/// otherwise the smallest tied label wins.
pub fn argmax_keep(row: &[f64], current: usize) -> usize {
    let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if row[current] == best {
        current
    } else {
        row.iter().position(|&s| s == best).expect("row is nonempty")
    }
}

/// Gap between the score of `label` and the best other score.
pub fn margin(row: &[f64], label: usize) -> f64 {
    let other = row
        .iter()
        .enumerate()
        .filter(|&(a, _)| a != label)
        .map(|(_, &s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    row[label] - other
}

/// Signed centered votes `(Ḡx)_u` from the influencing set.
pub fn signed_votes(g: &Graph, x: &[i8], influence: &[bool], density: f64) -> Vec<f64> {
    let total: f64 = x.iter().zip(influence).filter(|(_, &i)| i).map(|(&v, _)| v as f64).sum();
    (0..g.n())
        .map(|u| {
            let s: f64 = g
                .neighbors(u)
                .iter()
                .filter(|&&v| influence[v as usize])
                .map(|&v| x[v as usize] as f64)
                .sum();
            let own = if influence[u] { x[u] as f64 } else { 0.0 };
            s - density * (total - own)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scores_match_hand_count() {
        // path 0-1-2-3, labels 0 0 1 1
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let s = community_scores(&g, &[0, 0, 1, 1], 2, &[true; 4], 0.5);
        // vertex 1: one neighbour in each community; others: 1 in 0, 2 in 1
        assert_eq!(&s[2..4], &[1.0 - 0.5, 1.0 - 1.0]);
        assert_eq!(argmax_keep(&[1.0, 1.0], 1), 1);
        assert_eq!(argmax_keep(&[1.0, 2.0, 2.0], 0), 1);
        assert_eq!(margin(&[3.0, 1.0, 2.0], 0), 1.0);
        let v = signed_votes(&g, &[1, 1, -1, -1], &[true; 4], 0.5);
        assert_eq!(v[1], 0.0 - 0.5 * (0.0 - 1.0));
    }
}
