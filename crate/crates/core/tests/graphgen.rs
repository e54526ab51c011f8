use blockmodel_lab::graphgen::{corrupt, sample_sbm, split_graph, Graph, Strategy as Attack};
use blockmodel_lab::model::{derive, SbmParams};
use proptest::prelude::*;

fn check_graph(g: &Graph) {
    let mut count = 0;
    for u in 0..g.n() {
        let nb = g.neighbors(u);
        assert_eq!(nb.len(), g.degree(u));
        assert!(nb.windows(2).all(|w| w[0] < w[1]), "sorted, no duplicates");
        for &v in nb {
            assert_ne!(v as usize, u, "self loop at {u}");
            assert!(g.has_edge(v as usize, u), "asymmetric edge {u}-{v}");
        }
        count += nb.len();
    }
    assert_eq!(count, 2 * g.num_edges());
}

fn strategies() -> impl Strategy<Value = Attack> {
    prop_oneof![
        Just(Attack::RandomRewire),
        Just(Attack::ClusterDisguise),
        Just(Attack::VotePoison { budget: None }),
        (0usize..30).prop_map(|b| Attack::VotePoison { budget: Some(b) }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn samples_are_simple_and_balanced(
        k in prop::sample::select(vec![2usize, 4, 8]),
        blocks in 5usize..40,
        d in 1.0f64..20.0,
        eps in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let p = SbmParams::new(k * blocks, k, d.min((k * blocks) as f64 / 10.0), eps, 0.0).unwrap();
        let (g, truth) = sample_sbm(&p, seed).unwrap();
        check_graph(&g);
        prop_assert!(truth.is_balanced());
        prop_assert_eq!(truth.n(), g.n());
    }

    #[test]
    fn corruption_is_local(
        strategy in strategies(),
        eta in 0.0f64..0.2,
        seed in any::<u64>(),
    ) {
        let p = SbmParams::new(200, 4, 12.0, 0.8, eta).unwrap();
        let (g, truth) = sample_sbm(&p, seed).unwrap();
        let (h, report) = corrupt(&g, &truth, &p, strategy, seed ^ 1).unwrap();
        check_graph(&h);
        prop_assert_eq!(report.corrupted.len(), (eta * 200.0).floor() as usize);
        let mut bad = vec![false; 200];
        for &u in &report.corrupted {
            prop_assert!(u < 200);
            bad[u] = true;
        }
        for u in (0..200).filter(|&u| !bad[u]) {
            for v in (u + 1..200).filter(|&v| !bad[v]) {
                prop_assert_eq!(g.has_edge(u, v), h.has_edge(u, v));
            }
        }
    }

    #[test]
    fn split_partitions_every_edge(q in 0.0f64..=1.0, seed in any::<u64>()) {
        let p = SbmParams::new(300, 2, 20.0, 1.0, 0.0).unwrap();
        let (g, _) = sample_sbm(&p, seed).unwrap();
        let (g1, g2) = split_graph(&g, q, seed).unwrap();
        prop_assert_eq!(g1.num_edges() + g2.num_edges(), g.num_edges());
        for (u, v) in g.edges() {
            prop_assert!(g1.has_edge(u, v) != g2.has_edge(u, v));
        }
    }
}

#[test]
fn densities_match_edge_probabilities() {
    for (k, d, eps) in [(2, 20.0, 1.0), (4, 40.0, 0.5), (8, 60.0, 0.8)] {
        let n = 4000;
        let p = SbmParams::new(n, k, d, eps, 0.0).unwrap();
        let dq = derive(&p).unwrap();
        let (g, truth) = sample_sbm(&p, 11).unwrap();
        let (mut within, mut across) = (0.0, 0.0);
        for (u, v) in g.edges() {
            if truth.label(u) == truth.label(v) {
                within += 1.0;
            } else {
                across += 1.0;
            }
        }
        let m = (n / k) as f64;
        let pairs_in = k as f64 * m * (m - 1.0) / 2.0;
        let pairs_out = (n * (n - 1) / 2) as f64 - pairs_in;
        for (count, pairs, prob) in [(within, pairs_in, dq.p1), (across, pairs_out, dq.p2)] {
            let se = (pairs * prob * (1.0 - prob)).sqrt();
            assert!((count - pairs * prob).abs() <= 4.0 * se, "k={k}: {count} edges vs mean {}", pairs * prob);
        }
    }
}

#[test]
fn same_seed_same_graph() {
    let p = SbmParams::new(500, 4, 30.0, 1.0, 0.02).unwrap();
    let (g1, t1) = sample_sbm(&p, 5).unwrap();
    let (g2, t2) = sample_sbm(&p, 5).unwrap();
    assert_eq!(t1, t2);
    assert!(g1.edges().eq(g2.edges()));
    let a = corrupt(&g1, &t1, &p, Attack::RandomRewire, 9).unwrap();
    let b = corrupt(&g2, &t2, &p, Attack::RandomRewire, 9).unwrap();
    assert_eq!(a.1, b.1);
    assert!(a.0.edges().eq(b.0.edges()));
}

#[test]
fn edge_list_round_trip() {
    let p = SbmParams::new(120, 2, 10.0, 1.0, 0.0).unwrap();
    let (g, truth) = sample_sbm(&p, 2).unwrap();
    let mut buf = Vec::new();
    g.write_edge_list(&mut buf).unwrap();
    let h = Graph::read_edge_list(buf.as_slice()).unwrap();
    assert!(g.edges().eq(h.edges()));
    let mut buf = Vec::new();
    truth.write_to(&mut buf).unwrap();
    assert_eq!(blockmodel_lab::model::Labeling::read_from(buf.as_slice()).unwrap(), truth);
}
