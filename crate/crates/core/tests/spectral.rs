use blockmodel_lab::graphgen::{sample_sbm, Graph};
use blockmodel_lab::model::SbmParams;
use blockmodel_lab::spectral::{
    center, spectral_norm, subrect_check, top_eigvecs, trim_high_degree, Negated, PlantedResidual, SymmetricOperator,
};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

/// Dense centered adjacency written out entry by entry.
fn dense_centered(g: &Graph, d: f64, keep: &[bool]) -> DMatrix<f64> {
    let n = g.n();
    let c = d / n as f64;
    DMatrix::from_fn(n, n, |i, j| {
        if i == j || !keep[i] || !keep[j] {
            0.0
        } else if g.has_edge(i, j) {
            1.0 - c
        } else {
            -c
        }
    })
}

fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edges(n, edges.iter().copied().filter(|(u, v)| u != v && *u < n && *v < n)).unwrap()
}

fn edges_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..=50).prop_flat_map(|n| (Just(n), prop::collection::btree_set((0..n, 0..n), 0..200)))
        .prop_map(|(n, s)| {
            let mut e: Vec<(usize, usize)> = s.into_iter().filter(|(u, v)| u < v).collect();
            e.dedup();
            (n, e)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn centered_product_matches_dense(
        (n, edges) in edges_strategy(),
        d in 0.5f64..5.0,
        threshold in 1.0f64..10.0,
        x in prop::collection::vec(-1.0f64..1.0, 50),
    ) {
        let g = graph(n, &edges);
        let mask = trim_high_degree(&g, threshold).unwrap();
        for u in 0..n {
            prop_assert_eq!(mask.is_kept(u), g.degree(u) as f64 <= threshold);
        }
        let op = center(&g, d, Some(&mask));
        let dense = dense_centered(&g, d, mask.keep());
        let x = &x[..n];
        let mut y = vec![0.0; n];
        op.apply(x, &mut y);
        let expect = &dense * nalgebra::DVector::from_column_slice(x);
        for u in 0..n {
            prop_assert!((y[u] - expect[u]).abs() < 1e-10, "row {}: {} vs {}", u, y[u], expect[u]);
        }
        prop_assert_eq!(op.to_dense(), dense);
    }

    #[test]
    fn norm_is_sign_invariant((n, edges) in edges_strategy(), seed in any::<u64>()) {
        let g = graph(n, &edges);
        let op = center(&g, 2.0, None);
        let tol = 1e-7;
        let a = spectral_norm(&op, tol, 500, seed).unwrap();
        let b = spectral_norm(&Negated(&op), tol, 500, seed).unwrap();
        prop_assert!((a.value - b.value).abs() <= 2.0 * tol * a.value.max(1.0));
        let exact = SymmetricEigen::new(op.to_dense()).eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        prop_assert!((a.value - exact).abs() <= 1e-5 * exact.max(1.0), "{} vs {}", a.value, exact);
    }

    #[test]
    fn exhaustive_subrectangles_are_exact(
        entries in prop::collection::vec(-5.0f64..5.0, 42),
        n1 in 1usize..=6,
        n2 in 1usize..=7,
    ) {
        let m = DMatrix::from_row_slice(6, 7, &entries);
        let report = subrect_check(&m, n1, n2, f64::INFINITY, 1, 0);
        prop_assert!(report.exhaustive);
        // Every row mask and column mask, in binary counting order.
        let mut best = 0.0_f64;
        for rows in 0u32..1 << 6 {
            if rows.count_ones() as usize != n1 {
                continue;
            }
            for cols in 0u32..1 << 7 {
                if cols.count_ones() as usize != n2 {
                    continue;
                }
                let mut s = 0.0;
                for i in (0..6).filter(|i| rows >> i & 1 == 1) {
                    for j in (0..7).filter(|j| cols >> j & 1 == 1) {
                        s += m[(i, j)];
                    }
                }
                best = best.max(f64::abs(s));
            }
        }
        prop_assert!((report.max_abs_sum - best).abs() < 1e-9);
    }
}

#[test]
fn leading_eigenvectors_match_dense_solver() {
    let p = SbmParams::new(120, 4, 20.0, 1.0, 0.0).unwrap();
    let (g, _) = sample_sbm(&p, 3).unwrap();
    let op = center(&g, 20.0, None);
    let pairs = top_eigvecs(&op, 3, 1e-9, 120, 0).unwrap();
    let mut exact: Vec<f64> = SymmetricEigen::new(op.to_dense()).eigenvalues.iter().copied().collect();
    exact.sort_by(|a, b| b.total_cmp(a));
    for (got, want) in pairs.values.iter().zip(&exact) {
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }
}

#[test]
fn planted_residual_subtracts_expectation() {
    let p = SbmParams::new(40, 2, 8.0, 1.0, 0.0).unwrap();
    let (g, truth) = sample_sbm(&p, 8).unwrap();
    let op = center(&g, 8.0, None);
    let signal = 8.0 / 40.0;
    let res = PlantedResidual::new(&op, &truth, signal);
    let mut want = op.to_dense();
    for i in 0..40 {
        for j in (0..40).filter(|&j| j != i) {
            let x = if truth.label(i) == truth.label(j) { 0.5 } else { -0.5 };
            want[(i, j)] -= signal * x;
        }
    }
    for u in 0..40 {
        let mut e = vec![0.0; 40];
        e[u] = 1.0;
        let mut y = vec![0.0; 40];
        res.apply(&e, &mut y);
        for v in 0..40 {
            assert!((y[v] - want[(v, u)]).abs() < 1e-12);
        }
    }
}
