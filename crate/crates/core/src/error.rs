use thiserror::Error;

/// Errors raised by the simulator, compiler and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid map parameters: {0}")]
    InvalidParams(String),

    #[error("qubit index {index} out of range for a {n_qubits}-qubit state")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("duplicate qubit index {0} in gate")]
    DuplicateQubit(usize),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("initial state requires a positive packet width (K > 0)")]
    DegenerateWidth,

    #[error("no oscillation found: spectral peak {peak:.3e} below threshold {threshold:.3e}")]
    NoOscillation { peak: f64, threshold: f64 },

    #[error("fit did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("insufficient spread in scaling data: {0}")]
    InsufficientSpread(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Whether the error originates from numerical analysis rather than
    /// malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoOscillation { .. } | Error::NonConvergence(_) | Error::InsufficientSpread(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
