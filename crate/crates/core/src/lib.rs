//! Asymptotic MMSE limits of synchronous processing for cyclostationary
//! signals, with time-domain validation tools.

pub mod cli;
pub mod error;
pub mod kl;
pub mod mmse;
pub mod models;
pub mod sim;
pub mod spectral;

pub use error::{Error, Result};
