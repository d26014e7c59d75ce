//! Error type shared by every module of the crate.
//!
//! Each variant maps to a stable machine-readable category string (see
//! [`Error::category`]) so that callers such as the CLI can report failures
//! without parsing display text.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("duplicate vertex id {id:?}")]
    DuplicateVertex { id: String },
    #[error("unknown vertex {id:?}")]
    UnknownVertex { id: String },
    #[error("self-loop edge on vertex {id:?}")]
    SelfLoop { id: String },
    #[error("duplicate edge between {a:?} and {b:?}")]
    DuplicateEdge { a: String, b: String },
    #[error("graph is disconnected; component sizes {component_sizes:?}")]
    DisconnectedGraph { component_sizes: Vec<usize> },

    #[error("subset of vertices is empty")]
    InvalidSubset,
    #[error("plan covers {actual} vertices but the graph has {expected}")]
    PlanGraphMismatch { expected: usize, actual: usize },
    #[error("district {district} is empty")]
    EmptyDistrict { district: u32 },
    #[error("district label {label} out of range for {num_districts} districts")]
    DistrictOutOfRange { label: u32, num_districts: u32 },
    #[error("total population is zero")]
    DegeneratePopulation,
    #[error("district {district} is not contiguous")]
    NotContiguous { district: u32 },

    #[error("election {election:?} does not cover vertex {vertex:?}")]
    IncompleteElection { election: String, vertex: String },
    #[error("no election named {name:?} in the graph")]
    UnknownElection { name: String },
    #[error("district {district} has zero two-party votes")]
    ZeroVoteDistrict { district: u32 },
    #[error("election has zero two-party votes statewide")]
    DegenerateElection,

    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },
    #[error("initial plan rejected: {reason}")]
    InvalidSeed { reason: String },
    #[error(
        "chain exceeded {rejections} rejected proposals in a single step; state may be locked"
    )]
    StuckChain { rejections: u64 },
    #[error("no balanced cut found after {attempts} attempts")]
    StepFailed { attempts: u64 },
    #[error("plan has no cut edges to merge across")]
    DegeneratePlan,
    #[error("vertex subset is not connected")]
    NotConnected,
    #[error("seed generation gave up after {restarts} restarts")]
    SeedGenerationFailed { restarts: u64 },

    #[error("series is constant; correlation is undefined")]
    DegenerateSeries,
    #[error("series of length {length} is too short for lag {lag}")]
    SeriesTooShort { length: usize, lag: usize },
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("records are missing statistic {stat:?}")]
    MissingStatistic { stat: String },
    #[error("records disagree on rank count: expected {expected}, found {actual}")]
    MismatchedShares { expected: usize, actual: usize },

    #[error("{vertices} vertices exceeds the enumeration guard of {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("{vertices} vertices cannot be split into districts of {arity}")]
    NoNestingExists { vertices: usize, arity: u32 },
    #[error("{vertices} vertices cannot form {num_districts} districts of size {size}")]
    NoPartitionExists {
        vertices: usize,
        num_districts: u32,
        size: u32,
    },

    #[error("vertex {id:?} has no district assignment")]
    UnassignedVertex { id: String },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable category slug for machine consumption (CLI exit diagnostics).
    pub fn category(&self) -> &'static str {
        match self {
            Error::EmptyGraph => "empty-graph",
            Error::DuplicateVertex { .. } => "duplicate-vertex",
            Error::UnknownVertex { .. } => "unknown-vertex",
            Error::SelfLoop { .. } => "self-loop",
            Error::DuplicateEdge { .. } => "duplicate-edge",
            Error::DisconnectedGraph { .. } => "disconnected-graph",
            Error::InvalidSubset => "invalid-subset",
            Error::PlanGraphMismatch { .. } => "plan-graph-mismatch",
            Error::EmptyDistrict { .. } => "empty-district",
            Error::DistrictOutOfRange { .. } => "district-out-of-range",
            Error::DegeneratePopulation => "degenerate-population",
            Error::NotContiguous { .. } => "not-contiguous",
            Error::IncompleteElection { .. } => "incomplete-election",
            Error::UnknownElection { .. } => "unknown-election",
            Error::ZeroVoteDistrict { .. } => "zero-vote-district",
            Error::DegenerateElection => "degenerate-election",
            Error::InvalidConfig { .. } => "invalid-config",
            Error::InvalidSeed { .. } => "invalid-seed",
            Error::StuckChain { .. } => "stuck-chain",
            Error::StepFailed { .. } => "step-failed",
            Error::DegeneratePlan => "degenerate-plan",
            Error::NotConnected => "not-connected",
            Error::SeedGenerationFailed { .. } => "seed-generation-failed",
            Error::DegenerateSeries => "degenerate-series",
            Error::SeriesTooShort { .. } => "series-too-short",
            Error::EmptyEnsemble => "empty-ensemble",
            Error::MissingStatistic { .. } => "missing-statistic",
            Error::MismatchedShares { .. } => "mismatched-shares",
            Error::TooLarge { .. } => "too-large",
            Error::NoNestingExists { .. } => "no-nesting-exists",
            Error::NoPartitionExists { .. } => "no-partition-exists",
            Error::UnassignedVertex { .. } => "unassigned-vertex",
            Error::Schema { .. } => "schema",
            Error::Io { .. } => "io",
        }
    }
}
