use num_complex::Complex64;
use thiserror::Error;

/// Errors shared by the numerical kernels.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(String),

    /// An evaluation point fell within the guard distance of a pole.
    #[error("evaluation too close to the pole at {pole} (distance {distance:.3e})")]
    PoleProximity { pole: Complex64, distance: f64 },

    /// Newton (or bisection) iteration did not converge.
    #[error("root iteration failed to converge: {0}")]
    NoConvergence(String),

    /// Pseudo-arclength continuation lost the branch.
    #[error("branch lost near K = {k}: {detail}")]
    BranchLost { k: f64, detail: String },

    /// One of the hypotheses (A1)-(A5) required by an operation fails.
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    /// Two distinct |y| candidates attain the maximal density within tolerance.
    #[error("degenerate transition candidates: {0}")]
    DegenerateTie(String),

    /// A trajectory left the asymptotic regime of the reduced model.
    #[error("reduced-model state exceeded |alpha| = {limit} at t = {t}")]
    Overflow { t: f64, limit: f64 },

    /// The post-transient window is too short for the requested measurement.
    #[error("analysis window too short: {0}")]
    WindowTooShort(String),

    /// A decay fit was requested on a signal that does not decay.
    #[error("signal is not decaying: {0}")]
    NonDecaying(String),

    /// A precondition on the inputs fails.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
