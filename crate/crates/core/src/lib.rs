//! Anderson model on the Sierpinski gasket graph.
//!
//! The crate builds finite gasket regions ([`lattice`]), assembles random
//! Schrödinger operators on them under three boundary conditions
//! ([`operators`]), counts and computes eigenvalues ([`spectra`]), evaluates
//! exact free spectra by spectral decimation ([`decimation`]) and estimates
//! the integrated density of states together with its low-energy tail
//! ([`ids`]).

pub mod decimation;
pub mod error;
pub mod ids;
pub mod lattice;
pub mod operators;
pub mod spectra;

pub use error::{GasketError, Result};
