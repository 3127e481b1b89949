use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("quantum integer [{0}] is undefined (need m >= 1)")]
    QuantumIndex(i64),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("lowest denominator coefficient is {0}, not a unit; the q-expansion is not integral")]
    NonUnitExpansion(String),

    #[error("generator index {index} out of range for {n} strands")]
    GeneratorIndex { n: usize, index: usize },

    #[error("strand count mismatch: {0} vs {1}")]
    StrandMismatch(usize, usize),

    #[error("invalid strand count {0}")]
    StrandCount(usize),

    #[error("invalid planar matching: {0}")]
    Matching(String),

    #[error("parse error at token {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("negative letter at position {0} outside the declared prefix")]
    NegativeLetter(usize),

    #[error("multicone index {index} out of range (word has {available} non-diagonal crossings)")]
    MulticoneIndex { index: usize, available: usize },

    #[error("tangle has no turnback to pull")]
    NoTurnback,

    #[error("rewrite engine produced s_h = {s_h} < y = {y}")]
    ShiftBound { s_h: i64, y: usize },

    #[error("rewrite engine hit a positive Reidemeister I move at slice {0}")]
    PositiveR1(usize),

    #[error("diagram has {crossings} crossings, limit is {limit}")]
    TooManyCrossings { crossings: usize, limit: usize },

    #[error("invalid braid spec: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
