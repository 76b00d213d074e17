//! Spin-block linear algebra shared by rotations and conditioned interactions.
//!
//! A spin operator `M` acts on a hybrid ket block-wise, `ψ'_a = Σ_i M_ai ψ_i`,
//! and on a density matrix as `ρ'_ab = Σ_ij M_ai M*_bj ρ_ij` where each `ψ_i`
//! and `ρ_ij` is an oscillator block.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::fock::linalg::sandwich;
use crate::fock::spin::check_pair;
use crate::fock::{HybridKet, HybridState, Pauli};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub(crate) fn spin_transform_ket(ket: &HybridKet, m: &Array2<C64>) -> HybridKet {
    let sd = ket.spin_dim();
    let d = ket.osc_dim();
    let mut out = Array1::zeros(sd * d);
    for a in 0..sd {
        let mut dst = out.slice_mut(s![a * d..(a + 1) * d]);
        for i in 0..sd {
            let c = m[[a, i]];
            if c != ZERO {
                dst.scaled_add(c, &ket.block(i));
            }
        }
    }
    HybridKet::new(sd, ket.n_max(), out).expect("dimensions preserved")
}

pub(crate) fn spin_transform_state(state: &HybridState, m: &Array2<C64>) -> HybridState {
    let sd = state.spin_dim();
    let d = state.osc_dim();
    let mut out = Array2::zeros((sd * d, sd * d));
    for a in 0..sd {
        for b in 0..sd {
            let mut dst = out.slice_mut(s![a * d..(a + 1) * d, b * d..(b + 1) * d]);
            for i in 0..sd {
                for j in 0..sd {
                    let c = m[[a, i]] * m[[b, j]].conj();
                    if c != ZERO {
                        dst.scaled_add(c, &state.block(i, j));
                    }
                }
            }
        }
    }
    HybridState::from_parts_unchecked(sd, state.n_max(), out)
}

/// Spin matrix whose columns are the σ-eigenvectors on pair (0,1), ordered
/// `(-1, +1)`; any third level is left fixed.
pub(crate) fn eigenbasis_matrix(axis: Pauli, spin_dim: usize) -> Array2<C64> {
    let mut v = Array2::eye(spin_dim).mapv(|x: f64| C64::new(x, 0.0));
    let ev = axis.eigenbasis();
    for (col, vec) in ev.iter().enumerate() {
        v[[0, col]] = vec[0];
        v[[1, col]] = vec[1];
    }
    v
}

pub(crate) fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// Applies `Σ_s |e_s⟩⟨e_s| ⊗ U_s` where `e_s` are the `axis` eigenvectors on
/// pair (0,1); `branch(s)` returns the oscillator action for eigenvalue `s = ±1`.
/// Level 2 of a qutrit is untouched.
pub(crate) fn conditioned_ket<F>(ket: &HybridKet, axis: Pauli, branch: F) -> Result<HybridKet>
where
    F: Fn(f64, ndarray::ArrayView1<C64>) -> Array1<C64>,
{
    check_pair((0, 1), ket.spin_dim())?;
    let v = eigenbasis_matrix(axis, ket.spin_dim());
    let rotated = if axis == Pauli::Z {
        ket.clone()
    } else {
        spin_transform_ket(ket, &dagger(&v))
    };
    let d = ket.osc_dim();
    let mut amps = rotated.amps().clone();
    for (idx, s) in [-1.0, 1.0].into_iter().enumerate() {
        let out = branch(s, rotated.block(idx));
        amps.slice_mut(s![idx * d..(idx + 1) * d]).assign(&out);
    }
    let mid = HybridKet::new(ket.spin_dim(), ket.n_max(), amps)?;
    Ok(if axis == Pauli::Z {
        mid
    } else {
        spin_transform_ket(&mid, &v)
    })
}

/// Density-matrix counterpart of [`conditioned_ket`] with dense branch unitaries
/// `(U_-, U_+)`.
pub(crate) fn conditioned_state(
    state: &HybridState,
    axis: Pauli,
    u_minus: &Array2<C64>,
    u_plus: &Array2<C64>,
) -> Result<HybridState> {
    check_pair((0, 1), state.spin_dim())?;
    let v = eigenbasis_matrix(axis, state.spin_dim());
    let mut work = if axis == Pauli::Z {
        state.clone()
    } else {
        spin_transform_state(state, &dagger(&v))
    };
    let sd = state.spin_dim();
    let unitary = |s: usize| -> Option<&Array2<C64>> {
        match s {
            0 => Some(u_minus),
            1 => Some(u_plus),
            _ => None,
        }
    };
    for a in 0..sd {
        for b in 0..sd {
            let blk = work.block(a, b).to_owned();
            let new = match (unitary(a), unitary(b)) {
                (Some(ua), Some(_)) if a == b => sandwich(ua, &blk),
                (Some(ua), Some(ub)) => ua.dot(&blk).dot(&dagger(ub)),
                (Some(ua), None) => ua.dot(&blk),
                (None, Some(ub)) => blk.dot(&dagger(ub)),
                (None, None) => continue,
            };
            work.block_mut(a, b).assign(&new);
        }
    }
    Ok(if axis == Pauli::Z {
        work
    } else {
        spin_transform_state(&work, &v)
    })
}

/// [`conditioned_state`] with the block action given as
/// `act(s_a, s_b, X) = U_{s_a} X U_{s_b}†`; `None` marks a level outside the pair.
pub(crate) fn conditioned_state_by<F>(
    state: &HybridState,
    axis: Pauli,
    act: F,
) -> Result<HybridState>
where
    F: Fn(Option<f64>, Option<f64>, &Array2<C64>) -> Array2<C64>,
{
    check_pair((0, 1), state.spin_dim())?;
    let v = eigenbasis_matrix(axis, state.spin_dim());
    let mut work = if axis == Pauli::Z {
        state.clone()
    } else {
        spin_transform_state(state, &dagger(&v))
    };
    let sd = state.spin_dim();
    let sign = |s: usize| match s {
        0 => Some(-1.0),
        1 => Some(1.0),
        _ => None,
    };
    for a in 0..sd {
        for b in 0..sd {
            if sign(a).is_none() && sign(b).is_none() {
                continue;
            }
            if b < a && sign(b).is_some() {
                // ρ_ab = ρ_ba†, already transformed
                let mirrored = dagger(&work.block(b, a).to_owned());
                work.block_mut(a, b).assign(&mirrored);
                continue;
            }
            let new = act(sign(a), sign(b), &work.block(a, b).to_owned());
            work.block_mut(a, b).assign(&new);
        }
    }
    Ok(if axis == Pauli::Z {
        work
    } else {
        spin_transform_state(&work, &v)
    })
}
