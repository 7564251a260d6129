//! Numerical laboratory for a single matter degree of freedom coupled to one
//! cavity mode.

pub mod coupling;
pub mod error;
pub mod field;
pub mod fourier;
pub mod grid;
pub mod hamiltonian;
pub mod potential;
pub mod spectra;

pub use error::{Error, Result};
