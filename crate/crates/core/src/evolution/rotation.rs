use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::branch::{spin_transform_ket, spin_transform_state};
use crate::error::Result;
use crate::fock::spin::{check_pair, rotation_2x2};
use crate::fock::{HybridKet, HybridState};

/// `exp(-iθσ_γ/2)` on levels `pair`, identity on any remaining level.
pub fn rotation_matrix(
    pair: (usize, usize),
    gamma: f64,
    theta: f64,
    spin_dim: usize,
) -> Result<Array2<C64>> {
    check_pair(pair, spin_dim)?;
    let r = rotation_2x2(gamma, theta);
    let mut m = Array2::eye(spin_dim).mapv(|x: f64| C64::new(x, 0.0));
    let lv = [pair.0, pair.1];
    for (a, &la) in lv.iter().enumerate() {
        for (b, &lb) in lv.iter().enumerate() {
            m[[la, lb]] = r[[a, b]];
        }
    }
    Ok(m)
}

/// Spin rotation about `σ_γ = cos γ σ_x + sin γ σ_y` by `theta` on `pair`.
pub fn spin_rotation(
    state: &HybridState,
    pair: (usize, usize),
    gamma: f64,
    theta: f64,
) -> Result<HybridState> {
    let m = rotation_matrix(pair, gamma, theta, state.spin_dim())?;
    Ok(spin_transform_state(state, &m))
}

pub fn spin_rotation_ket(
    ket: &HybridKet,
    pair: (usize, usize),
    gamma: f64,
    theta: f64,
) -> Result<HybridKet> {
    let m = rotation_matrix(pair, gamma, theta, ket.spin_dim())?;
    Ok(spin_transform_ket(ket, &m))
}
