use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("probabilities sum to {0}, expected 1")]
    NotTracePreserving(f64),

    #[error("bloch vector has norm {0} > 1")]
    UnphysicalState(f64),

    #[error("matrix is not a qubit density matrix: {0}")]
    InvalidDensityMatrix(&'static str),

    #[error("unknown region tag `{0}` (expected one of PT, CPT, EBC, TLG, PDIV, CPDIV)")]
    UnknownRegion(String),

    #[error("empty region expression")]
    EmptyExpression,

    #[error("non-polytopal region: {0} cannot be described by half-spaces")]
    NonPolytopal(String),

    #[error("half-space has a zero normal vector")]
    ZeroNormal,

    #[error("unbounded polytope")]
    UnboundedPolytope,

    #[error("exact value {0} does not fit in a 64-bit integer")]
    IntegerOverflow(String),

    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("no sample hit the denominator region {0}")]
    EmptyDenominator(String),

    #[error("Fisher-Rao volume requires a CPT-conjoined region, got {0}")]
    NotChannelRegion(String),

    #[error("region {0} appears to be empty: no proposal accepted in {1} draws")]
    EmptyRegion(String, u64),

    #[error("invalid rate schedule: {0}")]
    InvalidSchedule(&'static str),

    #[error("time {t} outside schedule range [0, {total}]")]
    TimeOutOfRange { t: f64, total: f64 },

    #[error("eigenvalue {0} is not strictly positive, channel is not TLG-reachable")]
    NotReachable(f64),

    #[error("trajectory needs at least 2 steps, got {0}")]
    TooFewSteps(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
