#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Pseudo-spectral toolkit for the defocusing nonlinear Klein-Gordon equation
//! `u_tt - Δu + u + |u|^{α-1}u = 0` on periodic boxes `[0, 2πP)^d`.
//!
//! * [`spectral`]: lattice fields, unitary FFT, Fourier multipliers.
//! * [`norms`]: Lebesgue, Sobolev and modulation norms, frequency boxes.
//! * [`propagator`]: exact linear Klein-Gordon flows.
//! * [`solver`]: energies, Strang splitting, Duhamel/Picard iteration.
//! * [`highlow`]: high-low frequency decomposition and the modified
//!   Hamiltonian experiment.

pub mod error;
pub mod highlow;
pub mod norms;
pub mod propagator;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{Field, GridSpec, Spectrum};
