//! Asymmetric-vortex pumped down-conversion in the OAM basis: pump spectra, joint
//! spiral spectra, Schmidt numbers and two-qubit Bell-state tomography.

pub mod config;
pub mod error;
pub mod experiments;
pub mod fieldgrid;
pub mod oamspec;
pub mod output;
pub mod spdc;
pub mod tomo;
pub mod vortex;

pub use error::{Error, Result};
