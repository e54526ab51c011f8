use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{rebalance_by_cost, Labeling};
use crate::seed;

const LLOYD_ITERS: usize = 100;

/// Best unbalanced Lloyd solution over all restarts.
#[derive(Clone, Debug)]
pub struct KmeansFit {
    pub assign: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub cost: f64,
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    centroids
        .iter()
        .enumerate()
        .map(|(c, m)| (c, dist2(p, m)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn seed_plus_plus<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centroids = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.push(points[pick].clone());
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(dist2(p, &centroids[centroids.len() - 1]));
        }
    }
    centroids
}

fn lloyd(points: &[Vec<f64>], mut centroids: Vec<Vec<f64>>) -> KmeansFit {
    let (n, k, dim) = (points.len(), centroids.len(), points[0].len());
    let mut assign = vec![usize::MAX; n];
    for _ in 0..LLOYD_ITERS {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let (c, _) = nearest(p, &centroids);
            if assign[i] != c {
                assign[i] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            counts[assign[i]] += 1;
            sums[assign[i]].iter_mut().zip(p).for_each(|(s, x)| *s += x);
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            } else {
                // reseed an empty cluster at the worst-served point
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = dist2(&points[a], &centroids[assign[a]]);
                        let db = dist2(&points[b], &centroids[assign[b]]);
                        da.total_cmp(&db).then(b.cmp(&a))
                    })
                    .expect("nonempty point set");
                centroids[c] = points[far].clone();
                assign[far] = c;
            }
        }
    }
    let cost = points.iter().zip(&assign).map(|(p, &c)| dist2(p, &centroids[c])).sum();
    KmeansFit { assign, centroids, cost }
}

/// k-means++ seeding followed by Lloyd iterations, best of `restarts` runs
/// by cost. Restarts run in parallel with per-restart seeds; ties in cost go
/// to the lower restart index.
pub fn kmeans_fit(points: &[Vec<f64>], k: usize, restarts: usize, seed: u64) -> Result<KmeansFit> {
    if points.is_empty() || points[0].is_empty() {
        return Err(Error::params("k-means needs at least one point of positive dimension"));
    }
    if k == 0 || k > points.len() {
        return Err(Error::params(format!("cannot form {k} clusters from {} points", points.len())));
    }
    if restarts == 0 {
        return Err(Error::params("k-means needs at least one restart"));
    }
    let fits: Vec<KmeansFit> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed::rng(seed::derive(seed, r as u64));
            lloyd(points, seed_plus_plus(points, k, &mut rng))
        })
        .collect();
    Ok(fits
        .into_iter()
        .reduce(|best, f| if f.cost < best.cost { f } else { best })
        .expect("at least one restart"))
}

/// Assigns every point to its nearest centroid and rebalances to exactly
/// `n / k` points per cluster by cheapest moves.
pub fn balanced_assign(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> Result<Labeling> {
    let (n, k) = (points.len(), centroids.len());
    if n % k != 0 {
        return Err(Error::params(format!("{n} points cannot be split evenly into {k} clusters")));
    }
    let dists: Vec<f64> = points.iter().flat_map(|p| centroids.iter().map(move |c| dist2(p, c))).collect();
    let mut assign: Vec<usize> = (0..n)
        .map(|i| {
            let row = &dists[i * k..(i + 1) * k];
            (0..k).fold(0, |b, c| if row[c] < row[b] { c } else { b })
        })
        .collect();
    let current = assign.clone();
    rebalance_by_cost(&mut assign, k, n / k, |u, t| dists[u * k + t] - dists[u * k + current[u]]);
    Labeling::new(assign, k)
}

/// Balanced k-means: [`kmeans_fit`] then [`balanced_assign`].
pub fn balanced_kmeans(points: &[Vec<f64>], k: usize, restarts: usize, seed: u64) -> Result<Labeling> {
    let fit = kmeans_fit(points, k, restarts, seed)?;
    balanced_assign(points, &fit.centroids)
}

/// Sum of squared distances to cluster means.
pub fn clustering_cost(points: &[Vec<f64>], labels: &Labeling) -> f64 {
    let dim = points[0].len();
    let k = labels.k();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(labels.assign()) {
        counts[c] += 1;
        sums[c].iter_mut().zip(p).for_each(|(s, x)| *s += x);
    }
    let means: Vec<Vec<f64>> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s.iter().map(|x| x / c.max(1) as f64).collect())
        .collect();
    points.iter().zip(labels.assign()).map(|(p, &c)| dist2(p, &means[c])).sum()
}
