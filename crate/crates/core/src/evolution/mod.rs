//! Spin rotations, conditioned nonlinear interactions, two-force synthesis and heating.

pub(crate) mod branch;
pub mod heating;
pub mod nonlinear;
pub mod rotation;
pub mod sdf;

pub use heating::{apply_heating, apply_heating_with, default_steps, NoiseSpec};
pub use nonlinear::{
    apply_conditioned_nonlinear, apply_conditioned_nonlinear_ket,
    apply_conditioned_nonlinear_noisy, spin_dependent_displacement,
    spin_dependent_displacement_ket, wrap_spin_echo, EchoStep, NonlinearSpec, SqueezeCache,
};
pub use rotation::{rotation_matrix, spin_rotation, spin_rotation_ket};
pub use sdf::{
    effective_coupling, effective_spin_basis, effective_squeeze, evolve_full_sdf,
    evolve_full_sdf_ket, SdfSpec,
};
