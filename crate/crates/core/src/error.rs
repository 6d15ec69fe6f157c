use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// `Re p` went negative on the validation grid: not a semigroup generator.
    #[error("not a semigroup generator: min Re p = {min_re_p:.3e} at z = {at}")]
    Admissibility { min_re_p: f64, at: String },

    #[error("degenerate generator: {0}")]
    Degenerate(String),

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("integrator step size underflow at t = {t:.6e} (h = {h:.3e})")]
    StepFailure { t: f64, h: f64 },

    #[error("quadrature did not reach tolerance {tol:.1e} (estimated error {err:.3e})")]
    QuadratureFailure { tol: f64, err: f64 },

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("wrong semigroup class: {0}")]
    Class(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("invalid descriptor: {0}")]
    Descriptor(String),
}
