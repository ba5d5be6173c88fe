use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the region where the operation is defined
    /// (e.g. `Im tau >= 0` for theta).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("truncation needs {needed} terms, cap is {cap}")]
    TermCap { needed: u64, cap: u64 },

    #[error("|z| = {modulus} exceeds magnitude cap {cap}")]
    MagnitudeCap { modulus: f64, cap: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("p = {p} and q = {q} are not coprime")]
    NotCoprime { p: i64, q: i64 },

    #[error("q = {q} does not divide N = {n}")]
    NotDivisor { q: i64, n: usize },

    #[error("displacement {0} is not physical at this time")]
    NotPhysical(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("norm drift {residual:e} at step {step} exceeds {limit:e}")]
    NormDrift { step: usize, residual: f64, limit: f64 },

    #[error("empty window: {0}")]
    EmptyWindow(String),
}
