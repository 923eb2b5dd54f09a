//! Gauss-Jacobi quadrature nodes and weights for large degree and large
//! parameters, computed from elementary-function asymptotic expansions of
//! the Jacobi polynomial, with an in-tree extended-precision oracle for
//! validation.
//!
//! The pipeline: [`params::JacobiParams`] derives the regime scalars,
//! [`phase`] provides the oscillation phase and its inversion, [`coeffs`]
//! builds the saddle-point series coefficients, [`evaluator`] assembles
//! polynomial and derivative values, [`nodes`] and [`weights`] produce the
//! quadrature data, and [`rule`] is the public facade. [`oracle`] holds
//! the double-double reference implementation used as ground truth.

pub mod coeffs;
pub mod dd;
pub mod error;
pub mod evaluator;
pub mod nodes;
pub mod oracle;
pub mod params;
pub mod phase;
pub mod rule;
mod series;
pub mod weights;

pub use error::{Error, Result};
pub use nodes::CorrectionOrder;
pub use params::{JacobiParams, RegimeConfig, RegimeReport};
pub use rule::{gauss_jacobi_rule, IntegrandMode, Method, QuadratureRule, RuleOptions};
