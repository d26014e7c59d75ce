//! Sampling and analysis of districting plans on dual graphs.
//!
//! Two Markov chains generate plan ensembles: a swap chain over k:1 nested
//! plans (upper-chamber districts built from exactly k adjacent lower-house
//! districts) and a recombination chain over unit-level plans constrained by
//! contiguity and population balance. Around them sit seat/share statistics,
//! convergence heuristics, a short-burst optimizer for manufacturing
//! seat-extreme maps, and exhaustive enumeration oracles that provide ground
//! truth at toy scale.
//!
//! Everything is deterministic given a graph, a seed plan, and an RNG seed.

pub mod diagnostics;
pub mod election;
pub mod ensemble;
pub mod enumeration;
pub mod error;
pub mod graph;
pub mod io;
pub mod recom;
pub mod seed;
pub mod short_burst;
pub mod swap;
mod util;

pub use election::{tally, DistrictTally, Election, Party};
pub use ensemble::{ElectionObserver, EnsembleRecord, Observer};
pub use error::{Error, Result};
pub use graph::{
    is_connected, is_contiguous_plan, is_k_nested, population_deviation, quotient_graph,
    DistrictId, DualGraph, NestingSpec, Plan, VertexId,
};
pub use recom::{run_recom, RecomConfig};
pub use seed::random_nested_seed;
pub use short_burst::{run_short_bursts, BurstConfig, BurstResult};
pub use swap::{is_valid_swap, run_swap, SwapConfig, SwapState};
