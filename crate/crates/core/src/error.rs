use thiserror::Error;

use crate::credal::Violation;

/// Errors raised by the inference machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("invalid model: {}", join_violations(.0))]
    InvalidModel(Vec<Violation>),

    #[error("credal row is infeasible")]
    Infeasible,

    /// The feasible region of every row is a subset of the probability
    /// simplex, so this can only come from a solver defect.
    #[error("internal error: linear program reported unbounded over a compact region")]
    Unbounded,

    #[error("size cap exceeded: {what} needs {required} entries, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        required: u128,
        cap: u128,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("row {0} is not given as vertices and cannot be converted")]
    NotVertexRow(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
