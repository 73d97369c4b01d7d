use thiserror::Error;

use crate::word::Word;

/// Errors raised by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid dimension N = {n} (supported: 2..=64)")]
    InvalidDimension { n: usize },
    #[error("dimension mismatch: N = {left} vs N = {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("generator index {index} out of range for N = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("step cap {max_steps} exceeded after a word of length {}", partial_word.len())]
    StepCapExceeded {
        max_steps: u64,
        partial_word: Word,
        partial_vector: Vec<String>,
    },
    #[error("non-convergent: {0}")]
    NonConvergent(String),
    #[error("vector is not nef")]
    NotNef,
    #[error("vector is not integral")]
    NotIntegral,
    #[error("nef vector is not big ({zeros} zero coordinates)")]
    NotBig { zeros: usize },
    #[error("vector is not timelike")]
    NonTimelike,
    #[error("pairing with the cusp vector is not positive")]
    ZeroPairing,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate span: the curve vectors are linearly dependent")]
    DegenerateSpan,
    #[error("invalid cusp {{{i}, {j}}} for N = {n}")]
    InvalidCusp { i: usize, j: usize, n: usize },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid boundary spec: {0}")]
    InvalidSpec(String),
    #[error("invalid recurrent program: {0}")]
    InvalidRecurrent(String),
    #[error("parabolic detection inconclusive at word depth {depth}")]
    AmbiguousAtDepth { depth: u64 },
    #[error("insufficient rows: need {needed}, got {got}")]
    InsufficientRows { needed: usize, got: usize },
    #[error("designation does not match the table: {0}")]
    DesignationMismatch(String),
    #[error("ring of dimension 2^{} exceeds the size guard", n + 1)]
    RingTooLarge { n: usize },
    #[error("oracle produced a non-integral Euler characteristic {value}")]
    NonIntegralCharacteristic { value: String },
    #[error("no chamber word found up to depth {depth}")]
    NotFound { depth: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("at s = {s}: {source}")]
    AtRow { s: String, source: Box<Error> },
}

impl Error {
    /// The underlying error with any row context removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtRow { source, .. } => source.root(),
            e => e,
        }
    }

    /// Numeric failures (as opposed to invalid input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self.root(),
            Error::StepCapExceeded { .. } | Error::NonConvergent(_) | Error::AmbiguousAtDepth { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
