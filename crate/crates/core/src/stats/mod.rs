//! Signal-to-noise calculus, concentration bounds for the vote statistic,
//! and Monte Carlo falsification tests of the voting lower bounds.

mod analytic;
mod margin;
mod montecarlo;

pub use analytic::{
    c_tilde, chernoff_tail_bound, concavity_check, concavity_gap, level_exponent, level_params, level_tail_bound,
    log_odds_r, log_r_bounds_check, vote_params, LevelParams, LogRBounds, MixtureSpec, Rounding, VoteMode,
    VoteParams,
};
pub use margin::{pairwise_margin_check, vote_margins, worst_margin_check, MarginReport};
pub use montecarlo::{mc_tail_check, sample_mixture, MixtureSampler, TailReport, MIN_TAIL_TRIALS};
