//! Centered adjacency operators, degree trimming, Lanczos eigensolvers and
//! subrectangle-sum checks.

mod lanczos;
mod operator;
mod subrect;
mod trim;

pub use lanczos::{extreme_eigpair, spectral_norm, top_eigvecs, EigenPairs, ExtremePair, NormEstimate};
pub use operator::{center, CenteredMatrix, Negated, PlantedResidual, SymmetricOperator};
pub use subrect::{subrect_bound, subrect_check, SubrectReport, EXHAUSTIVE_LIMIT};
pub use trim::{trim_high_degree, TrimMask};
