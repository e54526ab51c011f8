//! Model parameters, labelings and misclassification metrics.

mod labeling;
mod metrics;
mod params;

pub use labeling::{rebalance_by_cost, Bisection, Labeling};
pub(crate) use labeling::parse_field;
pub use metrics::{align, bisection_error, bisection_mismatch, confusion, error_k};
pub use params::{derive, derive_with_chi, solve_degree_for_snr, DerivedQuantities, SbmParams, DEFAULT_CHI};
