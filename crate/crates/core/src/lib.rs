//! Robust recovery of planted communities in the symmetric balanced
//! stochastic block model under adversarial node corruption.

pub mod error;
pub mod experiment;
pub mod graphgen;
pub mod init;
pub mod model;
pub mod pipeline;
pub mod sdp;
pub mod seed;
pub mod spectral;
pub mod stats;
pub mod verify;
pub mod vote;

pub use error::{Error, Result};
