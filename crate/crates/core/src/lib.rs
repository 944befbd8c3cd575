//! Low-rank network embedding and classification benchmark toolkit.
//!
//! The crate factors adjacency matrices of simple undirected graphs into
//! low-rank pairs (truncated spectral decomposition and logistic PCA),
//! reconstructs graphs from the factors, extracts structural features, and
//! measures with a multiclass classification benchmark how much class
//! identity the low-rank reconstructions preserve.

pub mod bench;
pub mod classify;
pub mod embed;
pub mod error;
pub mod features;
pub mod generators;
pub mod graph;
pub(crate) mod seedmix;

pub use error::{Error, ErrorCategory, Result};
pub use graph::{load_graph, save_graph, DenseAdjacency, Graph, GraphFormat};

/// Identity of the pseudo-random generator used by every seeded operation.
/// Recorded in manifests and reports so corpora regenerate bit-identically.
pub const PRNG_ALGORITHM: &str = "chacha8";
