use thiserror::Error;

/// Errors produced by instance construction, parsing, solving and reduction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: lo {0} > hi {1}")]
    InvalidInterval(i64, i64),

    #[error("lexicographic comparison is undefined on an empty set")]
    EmptyLexOperand,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("matching is not total on V")]
    PartialMatching,

    #[error("pinned value {value} is outside the domain of {side} variable {index}")]
    InvalidPin {
        side: &'static str,
        index: usize,
        value: i64,
    },

    #[error("instance too large for the brute-force oracle (n = {0}, limit 8)")]
    OracleTooLarge(usize),

    #[error("formula too large for the brute-force oracle (p = {0}, limit 24)")]
    FormulaTooLarge(usize),

    #[error("formula is not balanced: variable {var} has {pos} positive and {neg} negative occurrences")]
    Unbalanced { var: usize, pos: usize, neg: usize },

    #[error("variable x{0} has no occurrence in the formula")]
    UnusedVariable(usize),

    #[error("matching violates the expected gadget structure: {0}")]
    BadGadgetMatching(String),

    #[error("assignment does not NAE-satisfy the formula")]
    NotNaeSatisfying,
}

pub type Result<T> = std::result::Result<T, Error>;
