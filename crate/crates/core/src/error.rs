use thiserror::Error;

/// Errors produced by the solvers and assemblers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A constructed equation of state violates the structural assumptions.
    #[error("invalid equation of state: {0}")]
    InvalidEos(String),

    /// The hydrostatic integration ran past the radius cap without the
    /// enthalpy reaching zero (expected as gamma1 approaches 6/5).
    #[error("non-compact star: enthalpy still {h_at_cap:.3e} at r = {r_cap:.3e} (mu = {mu:.6e})")]
    NonCompactStar { mu: f64, r_cap: f64, h_at_cap: f64 },

    /// An iterative procedure failed to reach its tolerance.
    #[error("tolerance not reached: {0}")]
    Tolerance(String),

    /// The mass-radius curve is locally flat, so turning-point counting is
    /// not defined there.
    #[error("degenerate mass-radius curve: {0}")]
    DegenerateCurve(String),

    /// gamma1 = 4/3 is the mass-critical exponent; the small-mu unstable
    /// count is not defined there.
    #[error("mass-critical exponent gamma1 = 4/3")]
    MassCritical,

    /// Matrix assembly encountered an invalid state (e.g. negative density
    /// from interpolation).
    #[error("assembly error: {0}")]
    Assembly(String),

    /// A dense or banded eigenvalue computation failed.
    #[error("eigensolver failure: {0}")]
    Eigen(String),

    /// Adjacent mass shells crossed during a nonlinear run.
    #[error("shell crossing at t = {t:.6e}, cell {cell}")]
    ShellCrossing { t: f64, cell: usize },

    /// Invalid run or perturbation configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
