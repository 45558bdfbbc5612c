use thiserror::Error;

use crate::model::Kind;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("index {index} out of range for {n} individuals")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("solution of type `{solution}` does not match attack kind {kind}")]
    KindMismatch { kind: Kind, solution: &'static str },
    #[error("illegal operation: {0}")]
    IllegalOperation(String),
    #[error("precondition mismatch: {0}")]
    Precondition(String),
    #[error("oracle cap exceeded: {0}")]
    CapExceeded(String),
    #[error("no vertex separator exists between source and sink")]
    Infeasible,
    #[error("no polynomial algorithm known — use --algo brute ({0})")]
    NoPolynomialAlgorithm(String),
    #[error("invalid source problem: {0}")]
    InvalidSource(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
