//! Truncated Fock-space operators, spin operators and hybrid states.

pub mod action;
pub mod expm;
pub mod linalg;
pub mod operator;
pub mod spin;
pub mod squeeze;
pub mod state;
pub mod truncation;

pub use action::{displace_ket, displace_ket_in};
pub use operator::{
    fock_ket, make_annihilation, make_creation, make_momentum, make_number, make_parity,
    make_position, Operator,
};
pub use spin::{embed_spin_op, rotation_2x2, sigma_gamma, Pauli};
pub use squeeze::{
    constituent_state, constituent_state_in, displacement_via_eigen, make_displacement,
    make_displacement_with, make_generalized_squeeze, make_generalized_squeeze_with,
    squeeze_convention_phase, squeeze_left_sparse, squeeze_sandwich_sparse,
    squeezed_vacuum_fock_amplitudes, SqueezeBasis,
};
pub use state::{thermal_state, HybridKet, HybridState, OscState};
pub use truncation::{TruncationPolicy, DEFAULT_LEAKAGE_TOL, RELAXED_LEAKAGE_TOL};
