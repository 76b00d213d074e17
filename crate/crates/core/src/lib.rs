//! Simulator for a harmonic oscillator coupled to a two- or three-level spin:
//! spin-conditioned generalized squeezing, mid-circuit heralding, heating,
//! characteristic-function tomography and Wigner-negativity metrics.

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod sequence;
pub mod tomography;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use fock::{HybridKet, HybridState, Operator, OscState, Pauli, SqueezeBasis, TruncationPolicy};
