use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Shape, ring or arity mismatch between operands.
    #[error("structural error: {0}")]
    Structural(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("resource limit exceeded: {0}")]
    ResourceExceeded(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("matrix does not define a module map: {0}")]
    NotWellDefined(String),
    #[error("left leg is not a weak equivalence at level {k} (dim ker = {ker_dim}, dim coker = {coker_dim})")]
    NotWeakEquivalence { k: i64, ker_dim: i64, coker_dim: i64 },
    #[error("roofs live at different levels ({0} vs {1})")]
    LevelMismatch(i64, i64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: i64, found: i64 },
    #[error("denominator lies in the prime")]
    DenominatorInPrime,
    #[error("chart must be integral: {0}")]
    IntegralityRequired(String),
    #[error("bad locus has dimension {dim}, must be at most {max}")]
    BadLocusTooBig { dim: i64, max: i64 },
    #[error("module support is not contained in V(I)")]
    SupportNotContained,
    #[error("not a prime ideal: {0}")]
    NotPrime(String),
    #[error("not a local isomorphism: {0}")]
    NotLocalIso(String),
    #[error("witness is not certified")]
    UncertifiedWitness,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unresolved name `{name}` at line {line}")]
    Unresolved { name: String, line: usize },
}

impl Error {
    /// Short machine-readable tag used in JSON reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Structural(_) => "Structural",
            Error::InvalidRing(_) => "InvalidRing",
            Error::ResourceExceeded(_) => "ResourceExceeded",
            Error::VerificationFailed(_) => "VerificationFailed",
            Error::NotWellDefined(_) => "NotWellDefined",
            Error::NotWeakEquivalence { .. } => "NotWeakEquivalence",
            Error::LevelMismatch(..) => "LevelMismatch",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DenominatorInPrime => "DenominatorInPrime",
            Error::IntegralityRequired(_) => "IntegralityRequired",
            Error::BadLocusTooBig { .. } => "BadLocusTooBig",
            Error::SupportNotContained => "SupportNotContained",
            Error::NotPrime(_) => "NotPrime",
            Error::NotLocalIso(_) => "NotLocalIso",
            Error::UncertifiedWitness => "UncertifiedWitness",
            Error::Unsupported(_) => "Unsupported",
            Error::Parse { .. } => "Parse",
            Error::Unresolved { .. } => "Unresolved",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
