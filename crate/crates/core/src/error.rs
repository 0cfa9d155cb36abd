//! Error type shared by all modules.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The requested field order is not a prime power.
    NotPrimePower { q: u64 },
    /// The requested field order exceeds the table-driven cap.
    FieldTooLarge { q: u64, cap: u64 },
    /// Multiplicative inverse of zero requested.
    ZeroInverse,
    /// Operands live in different ambient spaces.
    AmbientMismatch,
    /// A vector or basis has the wrong length / dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// A precondition on arguments was violated.
    InvalidArgument(String),
    /// The requested enumeration or search is too large to run exactly.
    Infeasible { what: String, estimate: String },
    /// An input family fails a required Steiner-system check.
    NotSteiner(String),
    /// The named subspace is not a member of the family.
    NotInFamily,
    /// Strict deserialization rejected non-canonical input.
    NonCanonical(String),
    /// Malformed serialized data.
    Parse(String),
    /// An internal invariant that must hold by theorem was violated.
    Inconsistency(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrimePower { q } => write!(f, "q = {q} is not a prime power"),
            Error::FieldTooLarge { q, cap } => {
                write!(f, "q = {q} exceeds the supported cap {cap}")
            }
            Error::ZeroInverse => write!(f, "multiplicative inverse of 0 is undefined"),
            Error::AmbientMismatch => write!(f, "operands belong to different ambient spaces"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Infeasible { what, estimate } => {
                write!(
                    f,
                    "infeasible at desk scale: {what} (size estimate {estimate})"
                )
            }
            Error::NotSteiner(msg) => write!(f, "not a q-Steiner system: {msg}"),
            Error::NotInFamily => write!(f, "subspace is not a member of the family"),
            Error::NonCanonical(msg) => write!(f, "non-canonical input: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Inconsistency(msg) => write!(f, "internal inconsistency: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
