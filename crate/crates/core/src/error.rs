use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An ensemble description failed validation.
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    /// Window size outside the admissible range for the ensemble.
    #[error("window size {w} outside [{min}, {max}]")]
    WindowRange { w: usize, min: usize, max: usize },
    /// Integer overflow in exact polynomial arithmetic.
    #[error("coefficient overflow in polynomial arithmetic")]
    Overflow,
    /// The circulant lifting could not satisfy the girth constraint.
    #[error("girth filter exhausted after {retries} retries at base entry ({row}, {col}) with multiplicity {mult}")]
    GirthExhausted { row: usize, col: usize, mult: u32, retries: usize },
    /// Exhaustive search gave up at the configured cap.
    #[error("search exceeds cap: {0}")]
    SearchCap(String),
    /// Internal consistency check failed.
    #[error("internal error: {0}")]
    Internal(String),
    /// Malformed configuration or input file.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
