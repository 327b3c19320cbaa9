//! Modularity density maximization on undirected graphs.
//!
//! * [`graph`] and [`partition`]: immutable inputs and their text formats.
//! * [`metrics`]: modularity `Q`, modularity density `D`, weak condition.
//! * [`generators`]: benchmark networks with reference partitions.
//! * [`model`]: mixed-integer linear reformulation and LP-file emission.
//! * [`solver`]: exhaustive, branch-and-bound and local-search maximizers.

pub mod decimal;
pub mod generators;
pub mod graph;
pub mod metrics;
pub mod model;
pub mod partition;
pub mod solver;

pub use decimal::Precision;
pub use graph::{Graph, GraphError};
pub use metrics::{CommunityReport, CommunityStats, Weak};
pub use partition::{Partition, PartitionError};
