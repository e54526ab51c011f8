use nalgebra::DMatrix;
use rand::seq::index;
use serde::Serialize;

use crate::seed;

/// Largest absolute subrectangle sum found by [`subrect_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubrectReport {
    pub max_abs_sum: f64,
    pub bound: f64,
    pub exceeded: bool,
    /// True when every row subset was examined, making `max_abs_sum` exact.
    pub exhaustive: bool,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Row subsets enumerated in exhaustive mode at most.
pub const EXHAUSTIVE_LIMIT: f64 = 1e6;

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Sum of the `count` largest (`sign = 1`) or smallest (`sign = −1`) values,
/// with the chosen indices.
fn extreme_subset(values: &[f64], count: usize, sign: f64) -> (f64, Vec<usize>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| (sign * values[b]).total_cmp(&(sign * values[a])).then(a.cmp(&b)));
    idx.truncate(count);
    let s = idx.iter().map(|&i| values[i]).sum();
    (s, idx)
}

fn column_sums(m: &DMatrix<f64>, rows: &[usize]) -> Vec<f64> {
    (0..m.ncols()).map(|j| rows.iter().map(|&i| m[(i, j)]).sum()).collect()
}

fn row_sums(m: &DMatrix<f64>, cols: &[usize]) -> Vec<f64> {
    (0..m.nrows()).map(|i| cols.iter().map(|&j| m[(i, j)]).sum()).collect()
}

/// Advances `comb` to the next `r`-combination of `0..n` in lexicographic
/// order; returns false after the last one.
fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let r = comb.len();
    for i in (0..r).rev() {
        if comb[i] < n - r + i {
            comb[i] += 1;
            for j in i + 1..r {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Searches for the `n1 × n2` subrectangle of `m` with the largest absolute
/// sum. When at most [`EXHAUSTIVE_LIMIT`] row subsets exist, every one is
/// enumerated and the best columns for it are chosen exactly, so the result
/// is the true maximum. Otherwise alternating row/column improvement from
/// `samples` random starts gives a lower bound: the check can falsify the
/// bound but not certify it.
pub fn subrect_check(m: &DMatrix<f64>, n1: usize, n2: usize, bound: f64, samples: usize, seed: u64) -> SubrectReport {
    let (nr, nc) = m.shape();
    assert!(n1 >= 1 && n1 <= nr && n2 >= 1 && n2 <= nc, "subrectangle larger than matrix");
    let mut best = (0.0_f64, Vec::new(), Vec::new());
    let mut consider = |value: f64, rows: &[usize], cols: Vec<usize>| {
        if value.abs() > best.0 {
            best = (value.abs(), rows.to_vec(), cols);
        }
    };
    let exhaustive = binomial(nr, n1) <= EXHAUSTIVE_LIMIT;
    if exhaustive {
        let mut comb: Vec<usize> = (0..n1).collect();
        loop {
            let sums = column_sums(m, &comb);
            for sign in [1.0, -1.0] {
                let (s, cols) = extreme_subset(&sums, n2, sign);
                consider(s, &comb, cols);
            }
            if !next_combination(&mut comb, nr) {
                break;
            }
        }
    } else {
        let mut rng = seed::rng(seed);
        for _ in 0..samples.max(1) {
            for sign in [1.0, -1.0] {
                let mut rows = index::sample(&mut rng, nr, n1).into_vec();
                let mut last = f64::NEG_INFINITY;
                for _ in 0..100 {
                    let (_, cols) = extreme_subset(&column_sums(m, &rows), n2, sign);
                    let (s, r) = extreme_subset(&row_sums(m, &cols), n1, sign);
                    rows = r;
                    if sign * s <= last + 1e-12 {
                        break;
                    }
                    last = sign * s;
                    consider(s, &rows, cols);
                }
            }
        }
    }
    let (max_abs_sum, mut rows, mut cols) = best;
    rows.sort_unstable();
    cols.sort_unstable();
    SubrectReport { max_abs_sum, bound, exceeded: max_abs_sum > bound, exhaustive, rows, cols }
}

/// `(n1 + n2) σ √n`, doubled for the long–thin regime.
pub fn subrect_bound(n: usize, n1: usize, n2: usize, sigma: f64, long_thin: bool) -> f64 {
    let base = (n1 + n2) as f64 * sigma * (n as f64).sqrt();
    if long_thin {
        2.0 * base
    } else {
        base
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix() {
        let m = DMatrix::zeros(6, 6);
        let r = subrect_check(&m, 2, 3, 1.0, 4, 0);
        assert_eq!(r.max_abs_sum, 0.0);
        assert!(!r.exceeded && r.exhaustive);
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut c = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut c, 5) {
            count += 1;
        }
        assert_eq!(count, 10);
    }

    #[test]
    fn finds_planted_block() {
        let mut m = DMatrix::from_element(8, 8, -0.1);
        for i in 2..4 {
            for j in 5..8 {
                m[(i, j)] = 1.0;
            }
        }
        let r = subrect_check(&m, 2, 3, 5.0, 1, 0);
        assert_eq!(r.rows, vec![2, 3]);
        assert_eq!(r.cols, vec![5, 6, 7]);
        assert!((r.max_abs_sum - 6.0).abs() < 1e-12);
        assert!(r.exceeded);
    }
}
