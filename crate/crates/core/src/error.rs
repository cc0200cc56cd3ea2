//! Crate-wide error type.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the physically supported range.
    #[error("{quantity} = {value} outside supported range [{min}, {max}]")]
    Domain {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// A structural precondition was violated (e.g. phase matching).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid fiber/plan/receiver configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// The ODE reference integrator failed to converge.
    #[error("integration failure: {reason} (z = {z_m} m, step = {step_m} m)")]
    Integration { reason: String, z_m: f64, step_m: f64 },

    /// Raman table or other data file could not be parsed.
    #[error("data parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, min: f64, max: f64) -> Self {
        Error::Domain { quantity, value, min, max }
    }
}
