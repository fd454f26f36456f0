//! Ball-subgraph sketches for local graph clustering.
//!
//! HyperLogLog counters propagated over a graph estimate, for every node `v`
//! and radius `r`, the number of nodes, edges, triangles and wedges in the
//! ball of radius `r` around `v`. Ratios of these give conductance and
//! transitivity scores with Chebyshev and Vysochanskij–Petunin error
//! intervals, which in turn pick seeds for PageRank-Nibble.

pub mod community;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod graph;
pub mod hyperball;
pub mod oracle;
pub mod scalar;
pub mod sketch;

pub use error::{Error, Result};
pub use graph::{Graph, LoadedGraph};
pub use hyperball::{BallKind, CanonicalItem, CounterArray, GraphletLists};
pub use scalar::Scalar;
pub use sketch::{HllConfig, HllCounter};

pub type BallRun = hyperball::BallRun<f64>;
pub type BallRun32 = hyperball::BallRun<f32>;
pub type ConfidenceInterval = estimators::ConfidenceInterval<f64>;
pub type ConfidenceInterval32 = estimators::ConfidenceInterval<f32>;
pub type ClusterScores = estimators::ClusterScores<f64>;
pub type ClusterScores32 = estimators::ClusterScores<f32>;
pub type ErrorBoundConstants = estimators::ErrorBoundConstants<f64>;
