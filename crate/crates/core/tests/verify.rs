use blockmodel_lab::graphgen::{sample_sbm, Graph};
use blockmodel_lab::model::{derive, SbmParams};
use blockmodel_lab::verify::{verify_cluster, VerifyOutcome};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;

const N: usize = 2000;
const K: usize = 4;
const D: f64 = 500.0;

fn params(eps: f64) -> SbmParams {
    SbmParams::new(N, K, D, eps, 0.0).unwrap()
}

/// Re-derives all three acceptance constraints on the witness.
fn recheck(g: &Graph, s: &[usize], out: &VerifyOutcome, p: &SbmParams) {
    let z = &out.witness;
    assert!(z.iter().all(|u| s.contains(u)), "witness leaves the candidate set");
    let (n, k, d, eps) = (N as f64, K as f64, p.d(), p.eps());
    let alpha = d + (1.0 - 1.0 / k) * eps * d;
    let rho = (-2.0 * derive(p).unwrap().c).exp();
    assert!(z.len() as f64 >= (0.99 / k - p.eta() - rho) * n);
    let mut inside = vec![false; N];
    z.iter().for_each(|&u| inside[u] = true);
    let internal = g.edges().filter(|&(u, v)| inside[u] && inside[v]).count() as f64;
    let m = z.len() as f64;
    let mass = 2.0 * internal - d / n * m * (m - 1.0);
    assert!((mass - out.stats.mass).abs() < 1e-6 * mass.abs().max(1.0));
    assert!(mass >= 0.97 * (k - 1.0) * eps * d * n / k.powi(3));
    let c = alpha / n;
    let dense = DMatrix::from_fn(z.len(), z.len(), |i, j| {
        if i == j {
            0.0
        } else if g.has_edge(z[i], z[j]) {
            1.0 - c
        } else {
            -c
        }
    });
    let norm = SymmetricEigen::new(dense).eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    assert!(norm <= 4.0 * (alpha / k).sqrt() * 1.001, "spectral {norm}");
}

#[test]
fn yes_witnesses_satisfy_every_constraint() {
    let p = params(1.0);
    let dq = derive(&p).unwrap();
    for seed in 0..3 {
        let (g, truth) = sample_sbm(&p, seed).unwrap();
        for c in 0..K {
            let s = truth.members(c);
            let out = verify_cluster(&g, &s, &p, &dq).unwrap();
            assert!(out.is_yes(), "seed {seed} community {c}: {:?}", out.stats);
            recheck(&g, &s, &out, &p);
        }
        let mut mixed = truth.members(0)[..N / 8].to_vec();
        mixed.extend_from_slice(&truth.members(1)[..N / 8]);
        assert!(!verify_cluster(&g, &mixed, &p, &dq).unwrap().is_yes());
    }
}

#[test]
fn verdict_survives_vertex_relabeling() {
    let p = params(1.0);
    let dq = derive(&p).unwrap();
    let (g, truth) = sample_sbm(&p, 4).unwrap();
    let mut perm: Vec<usize> = (0..N).collect();
    perm.shuffle(&mut blockmodel_lab::seed::rng(1));
    let h = Graph::from_edges(N, g.edges().map(|(u, v)| (perm[u], perm[v]))).unwrap();
    let mut mixed = truth.members(2)[..N / 8].to_vec();
    mixed.extend_from_slice(&truth.members(3)[N / 8..]);
    for s in [truth.members(0), truth.members(1), mixed] {
        let t: Vec<usize> = s.iter().map(|&u| perm[u]).collect();
        let a = verify_cluster(&g, &s, &p, &dq).unwrap();
        let b = verify_cluster(&h, &t, &p, &dq).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(a.stats.size, b.stats.size);
        assert!((a.stats.mass - b.stats.mass).abs() < 1e-6);
    }
}

/// Graphs without planted structure, checked against a verifier that
/// expects full bias: the edge-mass constraint should reject.
#[test]
fn signal_free_graphs_are_rejected() {
    let assumed = params(1.0);
    let dq = derive(&assumed).unwrap();
    let null = params(0.0);
    let mut no = 0;
    for seed in 0..20 {
        let (g, truth) = sample_sbm(&null, seed).unwrap();
        let mut s = truth.members(seed as usize % K);
        s.sort_unstable();
        no += usize::from(!verify_cluster(&g, &s, &assumed, &dq).unwrap().is_yes());
    }
    assert!(no >= 19, "{no}/20 rejected");
}
