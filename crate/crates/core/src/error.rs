use thiserror::Error;

/// Errors raised by soft metric operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SoftError {
    #[error("dimension mismatch: expected {expected} components, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value {value} at component {component}")]
    NonFinite { component: usize, value: f64 },

    #[error("division by zero at component {component}")]
    ZeroDivisor { component: usize },

    #[error("unknown parameter label `{0}`")]
    UnknownLabel(String),

    #[error("unknown universe element `{0}`")]
    UnknownElement(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error(
        "rate violation at step {step}: observed step ratio {observed} exceeds certified rate {rate}"
    )]
    RateViolation {
        step: usize,
        observed: f64,
        rate: f64,
    },
}

pub type Result<T, E = SoftError> = std::result::Result<T, E>;
