//! Open-system dynamics of anyonic oscillators: thermal statistics of a
//! single deformed mode, a coupled dimer in a correlated bath, the
//! truncated Fock-space Lindblad generator and nonlinear 2D spectra.

// `!(x > 0.0)` style checks are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dimer;
pub mod error;
pub mod fock;
pub mod params;
pub mod spectra;
pub mod statistics;
pub mod sweep;

pub use error::Error;
pub use params::{AnyonParams, Conjugation, FrequencyConvention, JumpBasis};
