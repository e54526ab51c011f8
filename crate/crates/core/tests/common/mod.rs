//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use blockmodel_lab::graphgen::Graph;
use blockmodel_lab::model::Labeling;

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                prefix.push(c);
                go(prefix, used, out);
                prefix.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Misclassification rate minimized by enumerating every relabeling.
pub fn brute_force_error(hat: &[usize], truth: &[usize], k: usize) -> f64 {
    let n = hat.len();
    permutations(k)
        .iter()
        .map(|p| hat.iter().zip(truth).filter(|(&h, &t)| p[h] != t).count())
        .min()
        .unwrap() as f64
        / n as f64
}

/// One round of plain sign voting on the full centered adjacency, with no
/// trimming or capping; ties keep the current sign.
pub fn naive_vote(g: &Graph, x: &[i8], d: f64) -> Vec<i8> {
    let n = g.n();
    let density = d / n as f64;
    let total: f64 = x.iter().map(|&v| v as f64).sum();
    (0..n)
        .map(|u| {
            let mut s: f64 = g.neighbors(u).iter().map(|&v| x[v as usize] as f64).sum();
            s -= density * (total - x[u] as f64);
            if s > 0.0 {
                1
            } else if s < 0.0 {
                -1
            } else {
                x[u]
            }
        })
        .collect()
}

/// Sign vector of a two-community labeling: community 0 is `+1`.
pub fn signs(truth: &Labeling) -> Vec<i8> {
    truth.assign().iter().map(|&c| if c == 0 { 1 } else { -1 }).collect()
}

/// Misclassification rate of a sign vector against `truth`, up to a global
/// sign flip.
pub fn sign_error(x: &[i8], truth: &[i8]) -> f64 {
    let agree = x.iter().zip(truth).filter(|(a, b)| a == b).count();
    let n = x.len();
    agree.min(n - agree) as f64 / n as f64
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}
