use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("no normalizable ground state of h0 (k_x = {k_x}, k_y = {k_y}); both spring constants must be positive")]
    NoGroundState { k_x: f64, k_y: f64 },

    /// The complex evaluation of a propagator left an imaginary part that
    /// cannot be rounding noise. Indicates a branch-selection bug.
    #[error("propagator reality check failed: imaginary residue {residue:e} exceeds bound {bound:e} (k_x = {k_x}, k_y = {k_y}, omega = {omega}, t = {t})")]
    RealityCheck {
        residue: f64,
        bound: f64,
        k_x: f64,
        k_y: f64,
        omega: f64,
        t: f64,
    },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("state is not physical: {0}")]
    Unphysical(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("operation requires model parameters but the propagator is a composite")]
    CompositeProvenance,

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Whether this error stems from user configuration rather than the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::InvalidParameter { .. } | Error::NoGroundState { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
