use thiserror::Error;

/// Errors produced by state construction, decomposition and the experiment drivers.
#[derive(Debug, Error)]
pub enum MbnError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid bipartition: expected dim {expected}, state has dim {actual}")]
    InvalidBipartition { expected: usize, actual: usize },

    #[error("matrix is not Hermitian (max |m_ij - conj(m_ji)| = {0:.3e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1 within 1e-10")]
    BadTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue = {0:.3e})")]
    NotPositive(f64),

    #[error("generator ordering mismatch: state fails validation (min eigenvalue = {0:.3e})")]
    OrderingMismatch(f64),

    #[error("parameter out of range: {0}")]
    DomainError(String),

    #[error("Kraus completeness violated (max |sum K^d K - I| = {0:.3e})")]
    IncompleteChannel(f64),

    #[error("integrator trace drift {drift:.3e} exceeded 1e-6 in one step; reduce dt={dt}")]
    StepSize { drift: f64, dt: f64 },

    #[error("unknown measure: {0}")]
    UnknownMeasure(String),

    #[error("reference entanglement is zero; relative error undefined")]
    DegenerateReference,

    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("empty input: {0}")]
    EmptyInput(String),
}

pub type Result<T> = std::result::Result<T, MbnError>;
