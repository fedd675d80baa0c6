//! Periodic lattice fields and the unitary discrete Fourier transform.

mod fft;
mod field;
mod grid;
pub mod io;

pub(crate) use field::apply_even_table;
pub use field::{
    apply_multiplier, forward_transform, integrate, inverse_transform, l2_inner, Field, Spectrum, REAL_TOLERANCE,
};
pub use grid::{GridSpec, MAX_DIM};
