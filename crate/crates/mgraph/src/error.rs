use thiserror::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by graph construction and analysis operations.
///
/// Each variant names the violated invariant or precondition; the stable
/// machine-readable name is available through [`Error::name`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph is not connected")]
    Disconnected,
    #[error("edge {0} has non-positive length")]
    NonpositiveLength(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("polarization is unstable at vertex {0}")]
    UnstablePolarization(String),
    #[error("linear system is singular")]
    SingularSystem,
    #[error("polarized genus too small: {0}")]
    GenusTooSmall(String),
    #[error("measure is not a probability measure: total mass {0}")]
    NotProbability(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("every edge length in the assignment is zero")]
    TotalCollapse,
    #[error("negative length for edge {0}")]
    NegativeLength(String),
    #[error("length assignment does not cover the edge set: {0}")]
    AssignmentMismatch(String),
    #[error("empty exponent set")]
    EmptyExponentSet,
    #[error("exponent set contains the zero vector")]
    ZeroExponent,
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("negative input at coordinate {0}")]
    NegativeInput(usize),
    #[error("argument outside the punctured unit polydisk at coordinate {0}")]
    OutOfDomain(usize),
    #[error("bad simplex mesh: {0}")]
    BadMesh(String),
    #[error("bad edge type: {0}")]
    BadType(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable variant name, used by front ends for diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyGraph => "EmptyGraph",
            Error::Disconnected => "Disconnected",
            Error::NonpositiveLength(_) => "NonpositiveLength",
            Error::UnknownVertex(_) => "UnknownVertex",
            Error::UnknownEdge(_) => "UnknownEdge",
            Error::InvalidPoint(_) => "InvalidPoint",
            Error::UnstablePolarization(_) => "UnstablePolarization",
            Error::SingularSystem => "SingularSystem",
            Error::GenusTooSmall(_) => "GenusTooSmall",
            Error::NotProbability(_) => "NotProbability",
            Error::DomainMismatch(_) => "DomainMismatch",
            Error::TotalCollapse => "TotalCollapse",
            Error::NegativeLength(_) => "NegativeLength",
            Error::AssignmentMismatch(_) => "AssignmentMismatch",
            Error::EmptyExponentSet => "EmptyExponentSet",
            Error::ZeroExponent => "ZeroExponent",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::NegativeInput(_) => "NegativeInput",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::BadMesh(_) => "BadMesh",
            Error::BadType(_) => "BadType",
            Error::Parse(_) => "Parse",
        }
    }
}
