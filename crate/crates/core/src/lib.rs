//! Finite-blocklength rate regions and dispersion quantities for Slepian-Wolf
//! source coding, the two-user multiple-access channel and the asymmetric
//! broadcast channel.
//!
//! All information quantities are in bits.
//!
//! - [`probkit`]: Gaussian kernels (Q, Q⁻¹, Ψ, orthant probabilities up to d = 3)
//! - [`sw_stats`]: entropy vector, dispersion matrix, κ and ξ of a two-source pmf
//! - [`net_stats`]: the same statistics for MAC and ABC input/channel bundles
//! - [`regions`]: (n, ε) membership tests and boundary tracing
//! - [`solvers`]: local dispersion F(θ, ε) and weighted sum-rate dispersion G
//! - [`exponents`]: Gallager exponents and the n_D / n_E blocklength estimators
//! - [`oracles`]: exact type enumeration, Monte Carlo and a random-binning simulator

#![forbid(unsafe_code)]
// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use thiserror::Error;

pub mod exponents;
pub mod net_stats;
pub(crate) mod numeric;
pub mod oracles;
pub mod probkit;
pub mod regions;
pub mod solvers;
pub mod sw_stats;

pub use probkit::CovMatrix;
pub use sw_stats::{EntropyTriple, JointPmf2, SwDispersion};


/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge (error estimate {estimate:e})")]
    NonConvergence { what: &'static str, estimate: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unbounded: {0}")]
    Unbounded(String),

    #[error("kappa unavailable: pmf has a zero cell")]
    KappaUnavailable,

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("resource guard: {0}")]
    Resource(String),

    #[error("internal consistency: {0}")]
    Internal(String),
}

impl Error {
    /// True for failures of numerical procedures or resource guards, as opposed
    /// to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::Resource(_) | Error::Internal(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
