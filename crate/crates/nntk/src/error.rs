use alloc::string::String;
use core::fmt;

/// Errors produced by this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: dimension mismatch, non-finite value, out-of-range
    /// hyperparameter, or an invalid dataset.
    Input(String),
    /// A dense linear solve met a pivot too small to trust; the system is
    /// singular to working precision.
    SingularSystem {
        /// Magnitude of the smallest pivot encountered.
        min_pivot: f64,
    },
    /// Refusal to build a dense matrix beyond the oracle size guard.
    TooLargeForDense { size: usize, limit: usize },
    /// A per-neuron curvature block is not positive definite.
    NotPositiveDefinite {
        /// Index of the offending neuron.
        neuron: usize,
        /// Its smallest block eigenvalue.
        eigenvalue: f64,
    },
    /// Training aborted because the definiteness guard failed mid-run.
    GuardFailedAtStep {
        step: usize,
        neuron: usize,
        eigenvalue: f64,
    },
    /// The limit kernel is singular to working precision, so the requested
    /// regularizer-free inversion is not defined.
    SingularLimitKernel { min_eigenvalue: f64 },
}

impl Error {
    pub(crate) fn input(message: impl Into<String>) -> Self {
        Error::Input(message.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Input(msg) => write!(f, "invalid input: {msg}"),
            Error::SingularSystem { min_pivot } => write!(
                f,
                "linear system is singular to working precision (smallest pivot {min_pivot:e})"
            ),
            Error::TooLargeForDense { size, limit } => write!(
                f,
                "dense oracle refused: {size} parameters exceeds the {limit}-dimension guard"
            ),
            Error::NotPositiveDefinite { neuron, eigenvalue } => write!(
                f,
                "curvature block of neuron {neuron} is not positive definite \
                 (smallest eigenvalue {eigenvalue:e}); increase the regularizer gamma \
                 or the width N"
            ),
            Error::GuardFailedAtStep {
                step,
                neuron,
                eigenvalue,
            } => write!(
                f,
                "training aborted at step {step}: curvature block of neuron {neuron} \
                 lost positive definiteness (smallest eigenvalue {eigenvalue:e})"
            ),
            Error::SingularLimitKernel { min_eigenvalue } => write!(
                f,
                "limit kernel is singular (smallest eigenvalue {min_eigenvalue:e}); \
                 gamma = 0 requires a nonsingular kernel"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
