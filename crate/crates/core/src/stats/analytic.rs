use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{derive, DerivedQuantities, SbmParams};

/// `(√(a^γ b^{1−γ}) − √b)²`, the signal-to-noise of a split in which a
/// `γ` fraction of a vertex's own side shares its community.
pub fn c_tilde(a: f64, b: f64, gamma: f64) -> Result<f64> {
    if !(b > 0.0 && a >= b && a.is_finite()) {
        return Err(Error::params(format!("c_tilde needs a ≥ b > 0, got a={a}, b={b}")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::params(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    let a_tilde = a.powf(gamma) * b.powf(1.0 - gamma);
    Ok((a_tilde.sqrt() - b.sqrt()).powi(2))
}

/// `log(p(1−q) / (q(1−p)))`.
pub fn log_odds_r(p: f64, q: f64) -> Result<f64> {
    let open = |x: f64| x > 0.0 && x < 1.0;
    if !(open(p) && open(q)) {
        return Err(Error::params(format!("log-odds needs p, q in (0, 1), got p={p}, q={q}")));
    }
    Ok(p.ln() - q.ln() + (-q).ln_1p() - (-p).ln_1p())
}

/// How fractional binomial counts were made integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rounding {
    Nearest,
}

/// Law of `X = Bin(αn, a/n) + Bin((β−α)n, b/n) − Bin(βn, b/n)` with
/// independent terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MixtureSpec {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub n: usize,
    /// Trial counts `(αn, (β−α)n, βn)` after rounding.
    pub counts: (u64, u64, u64),
    pub rounding: Rounding,
    /// Whether all three counts were already integers.
    pub exact_counts: bool,
}

impl MixtureSpec {
    pub fn new(alpha: f64, beta: f64, a: f64, b: f64, n: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= beta && beta <= 1.0) {
            return Err(Error::params(format!("need 0 < α ≤ β ≤ 1, got α={alpha}, β={beta}")));
        }
        let nf = n as f64;
        if !(a >= 0.0 && b >= 0.0 && a <= nf && b <= nf) {
            return Err(Error::params(format!("rates must lie in [0, n], got a={a}, b={b}")));
        }
        let raw = [alpha * nf, (beta - alpha) * nf, beta * nf];
        let exact_counts = raw.iter().all(|x| (x - x.round()).abs() < 1e-9);
        let r = raw.map(|x| x.round() as u64);
        Ok(Self { alpha, beta, a, b, n, counts: (r[0], r[1], r[2]), rounding: Rounding::Nearest, exact_counts })
    }

    /// `γ = α/β`.
    pub fn gamma(&self) -> f64 {
        self.alpha / self.beta
    }

    /// `ã = a^γ b^{1−γ}`.
    pub fn a_tilde(&self) -> f64 {
        self.a.powf(self.gamma()) * self.b.powf(1.0 - self.gamma())
    }

    pub fn mean(&self) -> f64 {
        let nf = self.n as f64;
        let (c1, c2, c3) = self.counts;
        c1 as f64 * self.a / nf + c2 as f64 * self.b / nf - c3 as f64 * self.b / nf
    }

    fn log_r_tilde(&self) -> f64 {
        let nf = self.n as f64;
        log_odds_r(self.a_tilde() / nf, self.b / nf).unwrap_or(0.0)
    }
}

/// `exp(−β C̃ + (θ/2) log R(ã/n, b/n))`, an upper bound on `Pr[X ≤ θ]`.
/// It can exceed one.
pub fn chernoff_tail_bound(spec: &MixtureSpec, theta: f64) -> f64 {
    let ct = if spec.b > 0.0 && spec.a >= spec.b {
        c_tilde(spec.a, spec.b, spec.gamma()).unwrap_or(0.0)
    } else {
        0.0
    };
    let tilt = if theta == 0.0 { 0.0 } else { 0.5 * theta * spec.log_r_tilde() };
    (-spec.beta * ct + tilt).exp()
}

/// The weaker level bound `exp(−(ln 2)²/4 · dε²/(β k²) + (θ/2) log R)`,
/// valid when `α = 1/k` and `β` is a level mass `2^{−i}`.
pub fn level_tail_bound(spec: &MixtureSpec, theta: f64, d: f64, eps: f64, k: usize) -> f64 {
    let exponent = level_exponent(d, eps, k, spec.beta);
    let tilt = if theta == 0.0 { 0.0 } else { 0.5 * theta * spec.log_r_tilde() };
    (-exponent + tilt).exp()
}

/// `(ln 2)²/4 · dε²/(β k²)`.
pub fn level_exponent(d: f64, eps: f64, k: usize, beta: f64) -> f64 {
    std::f64::consts::LN_2.powi(2) / 4.0 * d * eps * eps / (beta * (k * k) as f64)
}

/// Sizes and signal-to-noise of the level-`i` bisection subproblems.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelParams {
    pub i: usize,
    /// `2^{−i}`.
    pub beta: f64,
    /// Vertices per subproblem, `2 β n`.
    pub n_i: usize,
    /// Communities per side, `β k`.
    pub k_i: usize,
    /// `2^i / k`.
    pub gamma: f64,
    pub c_tilde: f64,
    /// `(ln 2)²/4 · dε²/(β k²)`, a lower bound on `β C̃`.
    pub level_exponent: f64,
}

pub fn level_params(i: usize, params: &SbmParams) -> Result<LevelParams> {
    let k = params.k();
    let levels = k.trailing_zeros() as usize;
    if i < 1 || i > levels {
        return Err(Error::params(format!("level {i} outside 1..={levels}")));
    }
    let dq = derive(params)?;
    let beta = 0.5f64.powi(i as i32);
    let gamma = (1usize << i) as f64 / k as f64;
    let c = if params.eps() == 0.0 { 0.0 } else { c_tilde(dq.a, dq.b, gamma)? };
    Ok(LevelParams {
        i,
        beta,
        n_i: params.n() >> (i - 1),
        k_i: k >> i,
        gamma,
        c_tilde: c,
        level_exponent: level_exponent(params.d(), params.eps(), k, beta),
    })
}

/// Values at one level: the two-sided bound on `log R̃` and the chain
/// `√(ã + b) ≤ √(a + b) = √(d(2 + ε(1 − 2/k))) ≤ √(3d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogRBounds {
    pub lower: f64,
    pub log_r: f64,
    pub upper: f64,
    pub root_tilde: f64,
    pub root_ab: f64,
    pub root_closed_form: f64,
    pub root_3d: f64,
    pub holds: bool,
}

pub fn log_r_bounds_check(params: &SbmParams, i: usize) -> Result<LogRBounds> {
    let lp = level_params(i, params)?;
    let dq = derive(params)?;
    let (n, d, eps, k) = (params.n() as f64, params.d(), params.eps(), params.k() as f64);
    let a_tilde = dq.a.powf(lp.gamma) * dq.b.powf(1.0 - lp.gamma);
    let log_r = log_odds_r(a_tilde / n, dq.b / n)?;
    let lower = lp.gamma * eps / 2.0;
    let upper = lp.gamma * eps * 3f64.ln() + dq.a / (n - dq.a);
    let root_tilde = (a_tilde + dq.b).sqrt();
    let root_ab = (dq.a + dq.b).sqrt();
    let root_closed_form = (d * (2.0 + eps * (1.0 - 2.0 / k))).sqrt();
    let root_3d = (3.0 * d).sqrt();
    let tol = 1e-12 * (1.0 + root_ab);
    let holds = lower <= log_r + 1e-12
        && log_r <= upper + 1e-12
        && root_tilde <= root_ab + tol
        && (root_ab - root_closed_form).abs() <= tol
        && root_closed_form <= root_3d + tol;
    Ok(LogRBounds { lower, log_r, upper, root_tilde, root_ab, root_closed_form, root_3d, holds })
}

/// `f(x) = x − (x + n/a − 1)^γ (x + n/b − 1)^{1−γ} + (n/a)^γ (n/b)^{1−γ} − 1`.
pub fn concavity_gap(a: f64, b: f64, n: f64, gamma: f64, x: f64) -> f64 {
    x - (x + n / a - 1.0).powf(gamma) * (x + n / b - 1.0).powf(1.0 - gamma) + (n / a).powf(gamma) * (n / b).powf(1.0 - gamma)
        - 1.0
}

/// Whether `f ≥ −10⁻⁹` on `grid_points` equally spaced points of `[0, 1]`.
pub fn concavity_check(a: f64, b: f64, n: f64, gamma: f64, grid_points: usize) -> bool {
    let m = grid_points.max(2);
    (0..m).all(|j| concavity_gap(a, b, n, gamma, j as f64 / (m - 1) as f64) >= -1e-9)
}

/// Which voting statement the parameters serve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VoteMode {
    /// Level bisections, `γ ∈ [0, 0.99]`.
    Bisection,
    /// Pairs of communities, `γ ∈ [0, 1 − 1000χk/(ε√d)]`.
    Pairwise,
}

/// Constants of the robust majority-vote constraint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VoteParams {
    pub gamma: f64,
    pub mode: VoteMode,
    /// Fraction of vertices allowed to lose the vote.
    pub rho: f64,
    /// `(1−γ)εd/(16k)`.
    pub alpha_gamma: f64,
    /// `640k/(1−γ) · exp(−γ C̃/2)`.
    pub beta_bound: f64,
    /// Chernoff tilt `0.001 (1−γ) C̃`.
    pub t: f64,
    /// Voting rounds; `None` lets the caller pick its default.
    pub rounds: Option<usize>,
}

impl VoteParams {
    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.rounds = Some(rounds);
        self
    }
}

pub fn vote_params(
    gamma: f64,
    level: &LevelParams,
    params: &SbmParams,
    derived: &DerivedQuantities,
    mode: VoteMode,
) -> Result<VoteParams> {
    let (d, eps, k) = (params.d(), params.eps(), params.k() as f64);
    let (hi, snr, rho) = match mode {
        VoteMode::Bisection => (0.99, level.c_tilde, (-gamma * level.beta * level.c_tilde / 2.0).exp()),
        VoteMode::Pairwise => {
            let hi = 1.0 - 1000.0 * derived.chi * k / (eps * d.sqrt());
            (hi, derived.c, (-gamma * derived.c / k).exp())
        }
    };
    if !(gamma >= 0.0 && gamma <= hi) {
        return Err(Error::params(format!("gamma {gamma} outside the admissible range [0, {hi:.4}] for {mode:?} voting")));
    }
    Ok(VoteParams {
        gamma,
        mode,
        rho,
        alpha_gamma: (1.0 - gamma) * eps * d / (16.0 * k),
        beta_bound: 640.0 * k / (1.0 - gamma) * (-gamma * snr / 2.0).exp(),
        t: 0.001 * (1.0 - gamma) * snr,
        rounds: None,
    })
}
