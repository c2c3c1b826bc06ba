//! Forward and inverse potential scattering for the Schrödinger equation.
//!
//! The crate solves the Lippmann–Schwinger equation for scalar and magnetic
//! potentials on a uniform grid, produces multi-frequency near- and far-field
//! data, recovers potentials from that data by Fourier-domain estimators, and
//! provides the quantities used to study how reconstruction stability improves
//! with the frequency band.

pub mod builtins;
pub mod error;
pub mod fields;
pub mod forward;
pub mod reconstruct;
pub mod stability;
pub mod specialfn;

pub use error::{Error, Result};
