//! Approximate bidirectional hidden personalized PageRank (BHPP) on weighted
//! bipartite graphs.
//!
//! The hidden graph lives on the U side: one hidden step from `u` walks to a
//! V-neighbor and straight back to a U-node, so the hidden transition matrix
//! is `P = U·V`. It is never materialized outside [`oracle`].

pub mod error;
pub mod evalkit;
pub mod graph;
pub mod oracle;
pub mod baselines;
pub mod bench;
pub mod push;
pub mod query;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use graph::BipartiteGraph;
