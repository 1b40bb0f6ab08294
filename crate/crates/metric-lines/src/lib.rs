//! Lines in finite metric spaces: line catalogs, the structure of generating
//! pairs (classification, poset levels, green components, collinear
//! orderings), and certified lower-bound witnesses, with builtin and random
//! instance generators.

pub mod catalog;
pub mod ingest;
pub mod instances;
pub mod levels;
pub mod metric;
pub mod ordering;
pub mod relations;
pub mod sweep;
pub mod witness;

pub use metric::{CollinearSequence, Distance, FiniteMetricSpace, MetricError, Pair, PointId};

/// The concrete space used throughout the CLI: exact 64-bit integer distances.
pub type Space = FiniteMetricSpace<i64>;
