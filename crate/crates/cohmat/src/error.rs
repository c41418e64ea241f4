//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, CohError>;

#[derive(Debug, Clone, PartialEq)]
pub enum CohError {
    /// Two operands have incompatible dimensions.
    DimensionMismatch { expected: usize, got: usize },
    /// A matrix required to be Hermitian is not, within tolerance.
    NotHermitian { deviation: f64 },
    /// A matrix required to be PSD has a negative eigenvalue.
    NotPsd { min_eigenvalue: f64 },
    /// A POVM failed validation; the message lists the violations.
    InvalidPovm(String),
    /// A probability table failed validation.
    InvalidTable(String),
    /// A scalar parameter is outside its admissible range.
    OutOfRange { name: &'static str, value: f64 },
    /// The requested quantity is undefined for the given input.
    Undefined(String),
    /// The operation is not supported for this input (documented restriction).
    Unsupported(String),
    /// A structural precondition failed (e.g. non-transitive unit-modulus
    /// pattern, broken group closure).
    Structure(String),
}

impl fmt::Display for CohError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CohError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            CohError::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (deviation {deviation:.3e})")
            }
            CohError::NotPsd { min_eigenvalue } => {
                write!(f, "matrix is not PSD (min eigenvalue {min_eigenvalue:.3e})")
            }
            CohError::InvalidPovm(msg) => write!(f, "invalid POVM: {msg}"),
            CohError::InvalidTable(msg) => write!(f, "invalid probability table: {msg}"),
            CohError::OutOfRange { name, value } => {
                write!(f, "parameter `{name}` out of range: {value}")
            }
            CohError::Undefined(msg) => write!(f, "undefined: {msg}"),
            CohError::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            CohError::Structure(msg) => write!(f, "structural error: {msg}"),
        }
    }
}

impl core::error::Error for CohError {}
