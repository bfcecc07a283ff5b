//! Online-preemptive and incremental matching algorithms with exact
//! oracles, dual certificates and seeded instance generators.
//!
//! The multi-matching algorithms share [`graph::MultiMatchingState`], which
//! keeps pairwise intersection counters and a work meter. Batch helpers in
//! [`harness`] fan out over rayon when the `parallel` feature is enabled.

pub mod certify;
pub mod error;
pub mod events;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod incremental;
pub mod instance;
pub mod mwm;
pub mod oracle;
pub mod preemptive_mcm;
pub mod rng;

/// Exact rational used for expectations, epsilons and dual values.
pub type Rational = num_rational::Ratio<i64>;

/// Version tag carried by every JSON and CSV record.
pub const SCHEMA_VERSION: u32 = 1;

pub use error::{Error, Result};
pub use graph::{ArrivalSequence, Edge, EdgeId, Flags, Graph, Matching, Mode};
