//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while setting up or evaluating a job.
///
/// The variants map one-to-one onto the CLI exit codes: configuration and
/// admissibility problems exit with 2, numerical failures with 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical parameter constraint is violated; the message names the inequality.
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    /// The requested kernel is not defined on the full field algebra for these parameters.
    #[error("regularity violation: {0}")]
    RegularityViolation(String),

    /// Bose factor evaluated exactly at its pole `β(ω−μ) = 0`.
    #[error("Bose factor pole at omega = {omega}, mu = {mu}")]
    Pole { omega: f64, mu: f64 },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: estimate {estimate:.6e}, error {error:.3e} after {subdivisions} subdivisions")]
    NonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    /// A power-law fit could not be performed on the given samples.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// An approximation flag was requested outside its admissible regime.
    #[error("approximation budget violated: {0}")]
    BudgetViolation(String),

    /// A ratio was requested against a vanishing normaliser.
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// Configuration file problem; `line` is 1-based, 0 when not line-specific.
    #[error("parse error (line {line}): {message}")]
    Parse { line: usize, message: String },

    /// Monte-Carlo estimate too noisy to be trusted.
    #[error("Monte-Carlo relative standard deviation {rel_sigma:.3} exceeds bound")]
    MonteCarloVariance { rel_sigma: f64 },

    /// The requested combination of options is not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Filesystem failure while reading configs or writing tables.
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code associated with the error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } | Error::DegenerateFit(_) | Error::MonteCarloVariance { .. } => 3,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
