use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use super::analytic::{chernoff_tail_bound, MixtureSpec};
use crate::error::{Error, Result};
use crate::seed;

/// Exact sampler for the signed three-binomial mixture.
#[derive(Clone, Debug)]
pub struct MixtureSampler {
    own: Binomial,
    other: Binomial,
    opposite: Binomial,
}

impl MixtureSampler {
    pub fn new(spec: &MixtureSpec) -> Result<Self> {
        let nf = spec.n as f64;
        let bin = |count: u64, rate: f64| {
            Binomial::new(count, (rate / nf).clamp(0.0, 1.0)).map_err(|e| Error::params(format!("binomial: {e}")))
        };
        let (c1, c2, c3) = spec.counts;
        Ok(Self { own: bin(c1, spec.a)?, other: bin(c2, spec.b)?, opposite: bin(c3, spec.b)? })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        self.own.sample(rng) as i64 + self.other.sample(rng) as i64 - self.opposite.sample(rng) as i64
    }
}

/// One draw of the mixture.
pub fn sample_mixture(spec: &MixtureSpec, seed: u64) -> Result<i64> {
    Ok(MixtureSampler::new(spec)?.sample(&mut seed::rng(seed)))
}

/// Empirical lower tail against the analytic bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailReport {
    pub theta: f64,
    pub analytic_bound: f64,
    pub empirical_tail: f64,
    pub trials: usize,
    pub mc_stderr: f64,
    /// `empirical − 4 · stderr > bound`.
    pub violation: bool,
}

impl TailReport {
    /// Re-judges the empirical tail against another bound.
    pub fn against(&self, bound: f64) -> TailReport {
        TailReport { analytic_bound: bound, violation: self.empirical_tail - 4.0 * self.mc_stderr > bound, ..*self }
    }
}

/// Minimum number of draws accepted by [`mc_tail_check`].
pub const MIN_TAIL_TRIALS: usize = 10_000;
const CHUNK: usize = 10_000;

/// Counts draws with `X ≤ θ`. Draws are split into fixed chunks with their
/// own derived seeds, so the result does not depend on the thread count.
pub fn mc_tail_check(spec: &MixtureSpec, theta: f64, trials: usize, seed: u64) -> Result<TailReport> {
    if trials < MIN_TAIL_TRIALS {
        return Err(Error::params(format!("need at least {MIN_TAIL_TRIALS} trials, got {trials}")));
    }
    let sampler = MixtureSampler::new(spec)?;
    let chunks = trials.div_ceil(CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seed::rng(seed::derive(seed, c as u64));
            let len = CHUNK.min(trials - c * CHUNK);
            (0..len).filter(|_| sampler.sample(&mut rng) as f64 <= theta).count()
        })
        .sum();
    let p = hits as f64 / trials as f64;
    let mc_stderr = (p * (1.0 - p) / trials as f64).sqrt();
    let analytic_bound = chernoff_tail_bound(spec, theta);
    Ok(TailReport {
        theta,
        analytic_bound,
        empirical_tail: p,
        trials,
        mc_stderr,
        violation: p - 4.0 * mc_stderr > analytic_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rates_give_zero() {
        let s = MixtureSpec::new(0.25, 0.5, 0.0, 0.0, 100).unwrap();
        for seed in 0..20 {
            assert_eq!(sample_mixture(&s, seed).unwrap(), 0);
        }
    }

    #[test]
    fn vacuous_tails() {
        let s = MixtureSpec::new(0.125, 0.5, 150.0, 50.0, 1000).unwrap();
        let hi = mc_tail_check(&s, 500.0, 10_000, 1).unwrap();
        assert_eq!(hi.empirical_tail, 1.0);
        assert!(!hi.violation);
        let lo = mc_tail_check(&s, -500.0, 10_000, 1).unwrap();
        assert_eq!(lo.empirical_tail, 0.0);
        assert!(!lo.violation);
        assert!(mc_tail_check(&s, 0.0, 10, 1).is_err());
    }
}
