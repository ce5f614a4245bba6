//! Exact Heisenberg dynamics, Gaussian-state entanglement and regime
//! classification for two harmonic modes coupled through `−ω l_z`.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod fit;
pub mod gaussian;
pub mod model;
pub mod normalmodes;
pub mod oracle;
pub mod propagator;

pub use error::{Error, Result};
pub use gaussian::{CovarianceState, EntanglementRecord, InitialConditionSpec};
pub use model::{classify, derive_spectral, ModelParams, Regime, SpectralData};
pub use propagator::{compose, propagate, Propagator};
