use thiserror::Error;

/// Errors produced by parameter validation and the numerical pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation point outside the oscillatory interval `[x_-, x_+]`.
    #[error("x = {x} outside the oscillatory interval [{x_minus}, {x_plus}]")]
    OutsideOscillatory { x: f64, x_minus: f64, x_plus: f64 },

    /// An iterative solver did not reach its tolerance within the
    /// iteration budget.
    #[error("no convergence in {op} after {iterations} iterations")]
    NoConvergence { op: &'static str, iterations: usize },

    /// The saddle point degenerated (`phi''(z_+)` vanished); happens only
    /// at the turning points.
    #[error("degenerate saddle point at x = {x}")]
    DegenerateSaddle { x: f64 },

    /// A zero bracket could not be established for the given index.
    #[error("bracket failure for zero index {ell}")]
    BracketFailure { ell: u32 },

    /// The computed node sequence violated strict ordering; the
    /// index-to-zero correspondence assumption failed.
    #[error("node ordering violated near ell = {ell}")]
    NodeOrdering { ell: u32 },

    /// Requested degree exceeds the oracle size guard.
    #[error("degree {n} exceeds the oracle size guard {limit}")]
    OracleSizeGuard { n: u32, limit: u32 },

    /// Regime violation with strict mode enabled.
    #[error("parameters outside the asymptotic regime: {0}")]
    OutOfRegime(String),

    /// The integrand returned a non-finite value.
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFiniteIntegrand { x: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
