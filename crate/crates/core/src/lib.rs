//! Periodically quenched non-Hermitian SSH chain with balanced gain and loss.
//!
//! The crate covers the Bloch-space Floquet spectrum and its PT phases, the
//! real-space stroboscopic evolution of a free-fermion Slater determinant
//! under the non-unitary Floquet operator, and the scaling analysis of the
//! steady-state entanglement entropy.

pub mod error;
pub mod numerics;

pub use error::{Error, Result};
pub mod bloch;
pub mod cli;
pub mod entanglement;
pub mod lattice;
pub mod spectral;
pub mod sweep;
