//! Block-model sampling, node-corruption adversaries and edge splitting.

mod adversary;
mod graph;
mod sample;

pub use adversary::{corrupt, CorruptionReport, Strategy};
pub use graph::Graph;
pub use sample::{balanced_partition, sample_sbm, split_graph};
