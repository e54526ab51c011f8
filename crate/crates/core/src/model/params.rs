use serde::Serialize;

use crate::error::{Error, Result};

/// Default value of the spectral constant used by the verification and
/// boosting thresholds.
pub const DEFAULT_CHI: f64 = 4.0;

/// Parameters of the symmetric balanced k-community block model, plus the
/// operator-supplied corruption budget `eta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SbmParams {
    n: usize,
    k: usize,
    d: f64,
    eps: f64,
    eta: f64,
}

impl SbmParams {
    /// Validates `k ≥ 2` a power of two, `k | n`, `0 < d < n`,
    /// `0 ≤ eps ≤ 1` and `0 ≤ eta < 1`.
    pub fn new(n: usize, k: usize, d: f64, eps: f64, eta: f64) -> Result<Self> {
        if k < 2 || !k.is_power_of_two() {
            return Err(Error::params(format!("k must be a power of two ≥ 2, got {k}")));
        }
        if n == 0 || n % k != 0 {
            return Err(Error::params(format!("n must be a positive multiple of k, got n={n}, k={k}")));
        }
        if !(d.is_finite() && d > 0.0 && d < n as f64) {
            return Err(Error::params(format!("d must satisfy 0 < d < n, got d={d}")));
        }
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::params(format!("eps must lie in [0, 1], got {eps}")));
        }
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::params(format!("eta must lie in [0, 1), got {eta}")));
        }
        Ok(Self { n, k, d, eps, eta })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Community size `n / k`.
    pub fn block_size(&self) -> usize {
        self.n / self.k
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.n, self.k, self.d, self.eps, eta)
    }

    /// Parameters of the graph obtained by keeping each edge with
    /// probability `q`: both edge probabilities scale by `q`.
    pub fn thinned(&self, q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::params(format!("thinning probability must lie in (0, 1], got {q}")));
        }
        Self::new(self.n, self.k, self.d * q, self.eps, self.eta)
    }

    /// Parameters of the subgraph induced on `k_sub` whole communities
    /// (`n_sub = k_sub · n / k` vertices). Edge probabilities are unchanged;
    /// the corruption fraction is rescaled to the smaller vertex count.
    pub fn restricted(&self, k_sub: usize) -> Result<Self> {
        if k_sub < 2 || k_sub > self.k || self.k % k_sub != 0 {
            return Err(Error::params(format!("cannot restrict k={} to {k_sub} communities", self.k)));
        }
        let dq = derive(self)?;
        let n_sub = self.block_size() * k_sub;
        let ks = k_sub as f64;
        let d_sub = (dq.p1 + (ks - 1.0) * dq.p2) * n_sub as f64 / ks;
        let eps_sub = if self.eps == 0.0 {
            0.0
        } else {
            ((dq.p1 * n_sub as f64 / d_sub - 1.0) / (1.0 - 1.0 / ks)).clamp(0.0, 1.0)
        };
        let eta_sub = (self.eta * self.n as f64 / n_sub as f64).min(0.999_999);
        Self::new(n_sub, k_sub, d_sub, eps_sub, eta_sub)
    }
}

/// Edge probabilities and signal-to-noise constants derived from
/// [`SbmParams`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivedQuantities {
    pub p1: f64,
    pub p2: f64,
    pub a: f64,
    pub b: f64,
    /// `(√a − √b)²`.
    pub c: f64,
    /// `exp(−2C) + eta`.
    pub delta_eta: f64,
    pub chi: f64,
}

impl DerivedQuantities {
    /// `exp(−2C)`, the fraction of vertices the degree trim may remove.
    pub fn rho(&self) -> f64 {
        (-2.0 * self.c).exp()
    }
}

pub fn derive(params: &SbmParams) -> Result<DerivedQuantities> {
    derive_with_chi(params, DEFAULT_CHI)
}

pub fn derive_with_chi(params: &SbmParams, chi: f64) -> Result<DerivedQuantities> {
    if !(chi > 0.0 && chi.is_finite()) {
        return Err(Error::params(format!("chi must be positive, got {chi}")));
    }
    let n = params.n as f64;
    let k = params.k as f64;
    let a = (1.0 + (1.0 - 1.0 / k) * params.eps) * params.d;
    let b = (1.0 - params.eps / k) * params.d;
    let (p1, p2) = (a / n, b / n);
    if p1 > 1.0 {
        return Err(Error::params(format!(
            "within-community edge probability {p1:.4} exceeds 1 (d={}, n={})",
            params.d, params.n
        )));
    }
    let c = (a.sqrt() - b.sqrt()).powi(2);
    Ok(DerivedQuantities {
        p1,
        p2,
        a,
        b,
        c,
        delta_eta: (-2.0 * c).exp() + params.eta,
        chi,
    })
}

/// Smallest `d` at which the model reaches signal-to-noise `c_target`.
/// `C` is linear in `d` for fixed `(k, eps)`; the root is bracketed and
/// refined by bisection so callers get `C(d) ≥ c_target` exactly.
pub fn solve_degree_for_snr(n: usize, k: usize, eps: f64, c_target: f64) -> Result<f64> {
    if !(c_target > 0.0) || eps <= 0.0 {
        return Err(Error::params("target SNR needs eps > 0 and a positive target"));
    }
    let snr = |d: f64| {
        let kf = k as f64;
        let a = (1.0 + (1.0 - 1.0 / kf) * eps) * d;
        let b = (1.0 - eps / kf) * d;
        (a.sqrt() - b.sqrt()).powi(2)
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while snr(hi) < c_target {
        hi *= 2.0;
        if hi > n as f64 {
            return Err(Error::params(format!("no d < n reaches C = {c_target}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if snr(mid) < c_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn derive_reference_values() {
        let p = SbmParams::new(1000, 2, 100.0, 1.0, 0.0).unwrap();
        let dq = derive(&p).unwrap();
        assert_relative_eq!(dq.a, 150.0, epsilon = 1e-12);
        assert_relative_eq!(dq.b, 50.0, epsilon = 1e-12);
        // (√150 − √50)² = 200 − 2√7500
        assert_relative_eq!(dq.c, 200.0 - 2.0 * 7500f64.sqrt(), epsilon = 1e-10);
        assert!((dq.c - 26.7949).abs() < 1e-4);

        let p = SbmParams::new(8000, 8, 2000.0, 1.0, 0.0).unwrap();
        let dq = derive(&p).unwrap();
        assert_relative_eq!(dq.a, 3750.0, epsilon = 1e-9);
        assert_relative_eq!(dq.b, 1750.0, epsilon = 1e-9);
    }

    #[test]
    fn zero_bias_has_no_signal() {
        let dq = derive(&SbmParams::new(600, 4, 30.0, 0.0, 0.1).unwrap()).unwrap();
        assert_eq!(dq.a, dq.b);
        assert_eq!(dq.c, 0.0);
        assert_relative_eq!(dq.delta_eta, 1.1, epsilon = 1e-12);
    }

    #[test]
    fn rejects_invalid() {
        assert!(SbmParams::new(100, 3, 10.0, 1.0, 0.0).is_err());
        assert!(SbmParams::new(101, 2, 10.0, 1.0, 0.0).is_err());
        assert!(SbmParams::new(100, 2, 0.0, 1.0, 0.0).is_err());
        assert!(SbmParams::new(100, 2, 10.0, 1.5, 0.0).is_err());
        assert!(SbmParams::new(100, 2, 10.0, 1.0, 1.0).is_err());
        let dense = SbmParams::new(100, 2, 90.0, 1.0, 0.0).unwrap();
        assert!(derive(&dense).is_err());
    }

    #[test]
    fn restriction_preserves_edge_probabilities() {
        let p = SbmParams::new(8000, 8, 400.0, 0.8, 0.01).unwrap();
        let dq = derive(&p).unwrap();
        for ks in [2, 4, 8] {
            let sub = p.restricted(ks).unwrap();
            let sq = derive(&sub).unwrap();
            assert_eq!(sub.n(), 1000 * ks);
            assert_relative_eq!(sq.p1, dq.p1, max_relative = 1e-12);
            assert_relative_eq!(sq.p2, dq.p2, max_relative = 1e-12);
        }
    }

    #[test]
    fn degree_solver_hits_target() {
        let d = solve_degree_for_snr(20000, 4, 1.0, 24.0).unwrap();
        let dq = derive(&SbmParams::new(20000, 4, d, 1.0, 0.0).unwrap()).unwrap();
        assert!(dq.c >= 24.0 && dq.c < 24.0 + 1e-9);
    }

    #[test]
    fn snr_is_monotone_on_grid() {
        for &k in &[2usize, 4, 8] {
            let mut prev_d = 0.0;
            for i in 1..=20 {
                let d = 5.0 * i as f64;
                let mut prev_e = -1.0;
                for j in 0..=10 {
                    let eps = j as f64 / 10.0;
                    let c = derive(&SbmParams::new(1024, k, d, eps, 0.0).unwrap()).unwrap().c;
                    assert!(c >= prev_e);
                    prev_e = c;
                }
                let c = derive(&SbmParams::new(1024, k, d, 0.7, 0.0).unwrap()).unwrap().c;
                assert!(c >= prev_d);
                prev_d = c;
            }
        }
    }
}
