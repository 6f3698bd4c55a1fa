//! Crate-wide error type.

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested index/length exceeds the available data.
    #[error("size error: {0}")]
    Size(String),

    /// The operation requires integer frequencies but the sequence is real.
    #[error("type error: {0}")]
    Type(String),

    /// A structural constraint was violated at construction time.
    #[error("constraint error: {0}")]
    Constraint(String),

    /// A caller-side certificate (e.g. a ratio bound) is missing.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// An exhaustive enumeration would exceed the configured budget.
    #[error("budget exceeded: {needed} configurations requested, budget is {budget}")]
    Budget { needed: u128, budget: u128 },

    /// Iterative quadrature failed to converge within the node budget.
    /// Carries the last two iterates so the caller can inspect the gap.
    #[error("quadrature did not converge within the node budget: last iterates {last_two:?}, tol {tol}")]
    Convergence { last_two: [(f64, f64); 2], tol: f64 },

    /// A truncation remainder dominates the quantity being computed.
    #[error("precision error: {0}")]
    Precision(String),

    /// A result underflows or overflows the representable range.
    #[error("range error: {0}")]
    Range(String),

    /// Malformed specification string (sequence/coefficient mini-language).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
