use thiserror::Error;

/// Errors produced by the certificate and Lyapunov machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },

    #[error("invalid exponent at position {pos}: {msg}")]
    InvalidExponent { pos: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },

    #[error("support is not a circuit")]
    NotCircuit,

    #[error("outer coefficient of {exponent:?} is not positive ({value})")]
    NonPositiveOuter { exponent: Vec<u32>, value: f64 },

    #[error("point is not in the affine hull of the given points")]
    NotInAffineHull,

    #[error("solver returned an inconclusive status: {0}")]
    SolverUnknown(String),

    #[error("no positive support left after sign distribution")]
    EmptyPositiveSupport,

    #[error("origin is not an equilibrium: component {index} has constant term {value}")]
    NoOriginEquilibrium { index: usize, value: f64 },

    #[error("candidate has a nonzero constant term ({0})")]
    CandidateConstantTerm(f64),

    #[error("candidate is the zero polynomial")]
    ZeroCandidate,

    #[error("support contains the zero exponent")]
    ZeroExponentInSupport,

    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
