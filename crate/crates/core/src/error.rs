use thiserror::Error;

use crate::geometry::AbcdMatrix;

pub type Result<T> = std::result::Result<T, CavityError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CavityError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// The propagator kernel divides by B; carries the offending matrix.
    #[error("degenerate propagator kernel: B = 0 for {0:?}")]
    DegenerateKernel(AbcdMatrix),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("undersampled grid: max phase step {phase_step:.4} rad exceeds pi/2 ({what})")]
    Undersampled { what: &'static str, phase_step: f64 },

    #[error("operator mismatch: {0}")]
    OperatorMismatch(String),

    #[error("stability precondition violated: {0}")]
    Stability(String),

    #[error("eigensolver failed for {kind} operator on a grid of {n} points")]
    Convergence { kind: String, n: usize },

    /// A lossy operator produced |gamma| >= 1.
    #[error("discretization inconsistency: eigenvalue modulus {modulus} >= 1 for a lossy operator")]
    GainDetected { modulus: f64 },

    #[error("stationary point on an integration boundary: y = {y}, M = {magnification}")]
    BoundaryValue { y: f64, magnification: f64 },

    #[error("test function does not decay below 1e-8 of its peak within |x| < {radius}")]
    NonDecaying { radius: f64 },
}
