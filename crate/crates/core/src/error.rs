use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("malformed cycle notation at byte {position}: {message}")]
    MalformedCycle { position: usize, message: String },

    #[error("point {point} out of range 1..={degree}")]
    PointOutOfRange { point: usize, degree: usize },

    #[error("point {point} repeated in cycle notation")]
    RepeatedPoint { point: usize },

    #[error("enumeration cap exceeded: {what} has more than {cap} elements")]
    CapExceeded { what: String, cap: usize },

    #[error("degree overflow: {what} would act on {degree} points (cap {cap})")]
    DegreeOverflow { what: String, degree: String, cap: usize },

    #[error("group is not transitive")]
    NotTransitive,

    #[error("subgroup is not normal in the ambient group")]
    NotNormal,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("epsilon too small: {0}")]
    EpsilonTooSmall(String),

    #[error("degenerate derangement proportion: {0}")]
    DegenerateDelta(String),

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("{path}: {source}")]
    AtPath {
        path: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps `self` with the location of the expression node that produced it.
    pub fn at(self, path: impl Into<String>) -> Error {
        Error::AtPath {
            path: path.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with any path annotations stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPath { source, .. } => source.root(),
            other => other,
        }
    }
}
