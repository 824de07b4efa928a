use thiserror::Error;

use crate::graph::VertexId;

/// Errors raised anywhere in the library.
///
/// The harness maps [`Error::is_numerical`] failures to a distinct exit code,
/// everything else is treated as a validation problem.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge {0} -> {0} is a loop")]
    LoopEdge(VertexId),
    #[error("edge {tail} -> {head} has non-positive or non-finite intensity {intensity}")]
    NonpositiveIntensity {
        tail: VertexId,
        head: VertexId,
        intensity: f64,
    },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("operation requires a finite graph, got oracle graph `{0}`")]
    OracleGraphUnsupported(String),
    #[error("series truncation order {needed} exceeds the cap {cap} (rate·t = {rate_time})")]
    TolUnreachable {
        needed: usize,
        cap: usize,
        rate_time: f64,
    },
    #[error("no path from {from} to {to}; the critical time is infinite")]
    Unreachable { from: VertexId, to: VertexId },
    #[error("node expansion budget of {0} exhausted")]
    FrontierExhausted(u64),
    #[error("graph has {size} vertices, limit is {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("no tilted exponent in the grid certifies a margin")]
    NoMargin,
    #[error("criterion report is not POSITIVE")]
    NotPositive,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed graph spec: {0}")]
    Spec(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TolUnreachable { .. } | Error::FrontierExhausted(_) | Error::NoMargin
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
