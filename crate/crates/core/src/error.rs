use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A pivot fell below the relative singularity threshold during LU
    /// elimination.
    #[error("matrix singular to working precision (pivot {pivot:.3e}, threshold {threshold:.3e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("input contains a non-finite entry")]
    NonFiniteInput,

    #[error("operation is undefined at z = 0")]
    ZeroPoint,

    #[error("tangency constraint degenerate (|c|^2 = {norm_sq:.3e})")]
    DegenerateConstraint { norm_sq: f64 },

    #[error("Jacobian singular at the evaluation point")]
    SingularJacobian,

    #[error("finite-difference step {step:.3e} exceeds the boundary margin {margin:.3e}")]
    StepTooLarge { step: f64, margin: f64 },

    #[error("mapping shape does not match the checker: {0}")]
    ShapeMismatch(String),

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("every sampled point had a singular Jacobian")]
    AllSamplesSingular,

    /// The convexity criterion and the theorem checkers are stated for
    /// exponents p_j >= 2; smaller exponents are refused in those contexts.
    #[error("exponent p_{index} = {value} violates the hypothesis p_j >= 2 required here")]
    UnsupportedExponent { index: usize, value: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid mapping: {0}")]
    InvalidMapping(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
