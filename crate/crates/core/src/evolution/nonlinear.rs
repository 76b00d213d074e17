//! Spin-conditioned generalized squeezing `exp(-i σ_β ⊗ (ζ* a^k + ζ a†^k)/2)`.
//!
//! The σ_β eigenvalue-`s` branch receives `G_k(s·ζ)`. On a qutrit the
//! interaction addresses the pair (0,1) only; level 2 is a spectator.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::branch::{conditioned_ket, conditioned_state, conditioned_state_by};
use super::heating::{default_steps, finish_noisy, split_evolve};
use super::rotation::{spin_rotation, spin_rotation_ket};
use crate::error::{Error, Result};
use crate::fock::{
    squeeze_sandwich_sparse, HybridKet, HybridState, Pauli, SqueezeBasis, TruncationPolicy,
};

/// Shared store of squeeze-generator eigendecompositions keyed by `(k, n_max)`.
#[derive(Debug, Default)]
pub struct SqueezeCache {
    inner: Mutex<HashMap<(usize, usize), Arc<SqueezeBasis>>>,
}

impl SqueezeCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(&self, k: usize, n_max: usize) -> Result<Arc<SqueezeBasis>> {
        let mut map = self.inner.lock().expect("squeeze cache poisoned");
        if let Some(b) = map.get(&(k, n_max)) {
            return Ok(Arc::clone(b));
        }
        let b = Arc::new(SqueezeBasis::new(k, n_max)?);
        map.insert((k, n_max), Arc::clone(&b));
        Ok(b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearSpec {
    pub k: usize,
    pub zeta: C64,
    pub cond: Pauli,
    /// Equatorial axis angle of the echo π pulse; `None` applies the interaction directly.
    pub echo: Option<f64>,
}

impl NonlinearSpec {
    pub fn new(k: usize, zeta: C64, cond: Pauli) -> Result<Self> {
        if !(1..=4).contains(&k) {
            return Err(Error::domain(format!(
                "interaction order k={k} outside 1..=4"
            )));
        }
        if !zeta.re.is_finite() || !zeta.im.is_finite() {
            return Err(Error::domain("squeezing parameter must be finite"));
        }
        Ok(Self {
            k,
            zeta,
            cond,
            echo: None,
        })
    }

    /// `ζ = Ω_k t e^{iφ}`.
    pub fn from_coupling(k: usize, omega_k: f64, t: f64, phi: f64, cond: Pauli) -> Result<Self> {
        Self::new(k, C64::from_polar(omega_k * t, phi), cond)
    }

    pub fn with_echo(mut self, gamma: f64) -> Self {
        self.echo = Some(gamma);
        self
    }

    pub fn direct(mut self) -> Self {
        self.echo = None;
        self
    }
}

/// One step of an echo-wrapped interaction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EchoStep {
    Interaction(NonlinearSpec),
    Rotation {
        pair: (usize, usize),
        gamma: f64,
        theta: f64,
    },
}

/// `[U(ζ/2), R_γ(π)_{01}, U(ζ/2·e^{iπ})]`.
///
/// The π pulse swaps the σ_z branches, so advancing the oscillator phase of the
/// second arm by π makes both arms push each branch the same way: the net
/// oscillator action is `G_k(±ζ)` with the spin flipped. An x-axis pulse leaves
/// the even superposition on `|1_s⟩` after a closing `R_y(π/2)`; a y-axis pulse
/// leaves the odd one there.
pub fn wrap_spin_echo(spec: NonlinearSpec, gamma: f64) -> Result<[EchoStep; 3]> {
    if spec.cond != Pauli::Z {
        return Err(Error::domain(format!(
            "spin echo requires z conditioning, got {}",
            spec.cond
        )));
    }
    let half = NonlinearSpec {
        zeta: spec.zeta * 0.5,
        echo: None,
        ..spec
    };
    let advanced = NonlinearSpec {
        zeta: half.zeta * C64::from_polar(1.0, PI),
        ..half
    };
    Ok([
        EchoStep::Interaction(half),
        EchoStep::Rotation {
            pair: (0, 1),
            gamma,
            theta: PI,
        },
        EchoStep::Interaction(advanced),
    ])
}

fn direct_ket(ket: &HybridKet, spec: &NonlinearSpec, basis: &SqueezeBasis) -> Result<HybridKet> {
    conditioned_ket(ket, spec.cond, |s, v| basis.apply(spec.zeta * s, v))
}

fn direct_state(
    state: &HybridState,
    spec: &NonlinearSpec,
    basis: &SqueezeBasis,
) -> Result<HybridState> {
    let um = basis.unitary(-spec.zeta);
    let up = basis.unitary(spec.zeta);
    conditioned_state(state, spec.cond, um.matrix(), up.matrix())
}

/// Pure-state path; honors `spec.echo`.
pub fn apply_conditioned_nonlinear_ket(
    ket: &HybridKet,
    spec: &NonlinearSpec,
    cache: &SqueezeCache,
    policy: TruncationPolicy,
) -> Result<HybridKet> {
    let basis = cache.basis(spec.k, ket.n_max())?;
    let out = match spec.echo {
        None => direct_ket(ket, spec, &basis)?,
        Some(gamma) => {
            let mut cur = ket.clone();
            for step in wrap_spin_echo(*spec, gamma)? {
                cur = match step {
                    EchoStep::Interaction(s) => direct_ket(&cur, &s, &basis)?,
                    EchoStep::Rotation { pair, gamma, theta } => {
                        spin_rotation_ket(&cur, pair, gamma, theta)?
                    }
                };
            }
            cur
        }
    };
    out.check_leakage(policy)?;
    Ok(out)
}

/// Density-matrix path; honors `spec.echo`.
pub fn apply_conditioned_nonlinear(
    state: &HybridState,
    spec: &NonlinearSpec,
    cache: &SqueezeCache,
    policy: TruncationPolicy,
) -> Result<HybridState> {
    let basis = cache.basis(spec.k, state.n_max())?;
    let out = match spec.echo {
        None => direct_state(state, spec, &basis)?,
        Some(gamma) => {
            let mut cur = state.clone();
            for step in wrap_spin_echo(*spec, gamma)? {
                cur = match step {
                    EchoStep::Interaction(s) => direct_state(&cur, &s, &basis)?,
                    EchoStep::Rotation { pair, gamma, theta } => {
                        spin_rotation(&cur, pair, gamma, theta)?
                    }
                };
            }
            cur
        }
    };
    out.check_leakage(policy)?;
    Ok(out)
}

fn noisy_arm(
    state: &HybridState,
    spec: &NonlinearSpec,
    ndot: f64,
    duration: f64,
) -> Result<HybridState> {
    let slices = default_steps(duration).max(1);
    let slice = spec.zeta / slices as f64;
    let k = spec.k;
    split_evolve(state, ndot, duration, slices, |st| {
        conditioned_state_by(st, spec.cond, |sa, sb, x| {
            squeeze_sandwich_sparse(k, sa.map(|s| slice * s), sb.map(|s| slice * s), x)
        })
    })
}

/// Interaction of total duration `duration` interleaved with heating at rate `ndot`.
/// With an echo, each arm lasts `duration/2` and the π pulse is instantaneous.
pub fn apply_conditioned_nonlinear_noisy(
    state: &HybridState,
    spec: &NonlinearSpec,
    duration: f64,
    ndot: f64,
    cache: &SqueezeCache,
    policy: TruncationPolicy,
) -> Result<HybridState> {
    if ndot == 0.0 || duration == 0.0 {
        return apply_conditioned_nonlinear(state, spec, cache, policy);
    }
    let mut out = match spec.echo {
        None => noisy_arm(state, spec, ndot, duration)?,
        Some(gamma) => {
            let mut cur = state.clone();
            for step in wrap_spin_echo(*spec, gamma)? {
                cur = match step {
                    EchoStep::Interaction(s) => noisy_arm(&cur, &s, ndot, 0.5 * duration)?,
                    EchoStep::Rotation { pair, gamma, theta } => {
                        spin_rotation(&cur, pair, gamma, theta)?
                    }
                };
            }
            cur
        }
    };
    finish_noisy(&mut out, policy)?;
    Ok(out)
}

/// Spin-dependent displacement: the `axis` eigenvalue-`s` branch receives `D(s·α)`.
pub fn spin_dependent_displacement_ket(
    ket: &HybridKet,
    axis: Pauli,
    alpha: C64,
    cache: &SqueezeCache,
    policy: TruncationPolicy,
) -> Result<HybridKet> {
    // D(α) = G_1(2iα)
    let spec = NonlinearSpec::new(1, C64::new(0.0, 2.0) * alpha, axis)?;
    apply_conditioned_nonlinear_ket(ket, &spec, cache, policy)
}

pub fn spin_dependent_displacement(
    state: &HybridState,
    axis: Pauli,
    alpha: C64,
    duration: f64,
    ndot: f64,
    cache: &SqueezeCache,
    policy: TruncationPolicy,
) -> Result<HybridState> {
    let spec = NonlinearSpec::new(1, C64::new(0.0, 2.0) * alpha, axis)?;
    apply_conditioned_nonlinear_noisy(state, &spec, duration, ndot, cache, policy)
}
