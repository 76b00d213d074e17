//! Mid-circuit projection and the readout-error mixture.

use ndarray::{s, Array1};
use serde::{Deserialize, Serialize};

use super::ir::Herald;
use crate::analysis::ReadoutErrors;
use crate::error::{Error, Result};
use crate::fock::{HybridKet, HybridState};

/// Probabilities below this are treated as impossible heralds.
pub const HERALD_FLOOR: f64 = 1e-15;

/// Spin level read as dark.
pub const DARK_LEVEL: usize = 1;

fn keeps(herald: Herald, level: usize) -> bool {
    (level == DARK_LEVEL) == (herald == Herald::Dark)
}

/// `Tr(P ρ)` for the outcome.
pub fn herald_probability(state: &HybridState, herald: Herald) -> f64 {
    state
        .spin_probs()
        .iter()
        .enumerate()
        .filter(|(s, _)| keeps(herald, *s))
        .map(|(_, p)| p)
        .sum()
}

/// Unnormalized `P ρ P`.
pub fn project_state(state: &HybridState, herald: Herald) -> HybridState {
    let mut out = state.clone();
    let sd = state.spin_dim();
    for a in 0..sd {
        for b in 0..sd {
            if !(keeps(herald, a) && keeps(herald, b)) {
                out.block_mut(a, b)
                    .fill(num_complex::Complex64::new(0.0, 0.0));
            }
        }
    }
    out
}

/// Normalized projection of a ket and its probability.
pub fn project_ket(ket: &HybridKet, herald: Herald) -> Result<(HybridKet, f64)> {
    let d = ket.osc_dim();
    let mut amps: Array1<_> = ket.amps().clone();
    for s in 0..ket.spin_dim() {
        if !keeps(herald, s) {
            amps.slice_mut(s![s * d..(s + 1) * d])
                .fill(num_complex::Complex64::new(0.0, 0.0));
        }
    }
    let p: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    if p < HERALD_FLOOR {
        return Err(Error::HeraldImpossible { probability: p });
    }
    let inv = 1.0 / p.sqrt();
    amps.mapv_inplace(|c| c * inv);
    Ok((HybridKet::new(ket.spin_dim(), ket.n_max(), amps)?, p))
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeraldedState {
    pub state: HybridState,
    /// `Tr(P ρ)` before readout errors.
    pub probability: f64,
    /// Probability of observing the outcome, readout errors included.
    pub observed_probability: f64,
}

/// Heralded state under imperfect readout:
/// `ρ ∝ P(h|h)·P ρ P + P(h|¬h)·P̄ ρ P̄`.
pub fn herald_mixture(
    rho_pre: &HybridState,
    herald: Herald,
    errors: &ReadoutErrors,
) -> Result<HeraldedState> {
    let (p_keep, p_false) = match herald {
        Herald::Dark => (errors.p_dark_given_dark(), errors.p_dark_given_bright),
        Herald::Bright => (
            errors.p_bright_given_bright(),
            errors.p_bright_given_dark + errors.p_lifetime_flip,
        ),
    };
    let other = match herald {
        Herald::Dark => Herald::Bright,
        Herald::Bright => Herald::Dark,
    };
    let sel = project_state(rho_pre, herald);
    let rest = project_state(rho_pre, other);
    let p_sel = herald_probability(rho_pre, herald);
    let p_rest = herald_probability(rho_pre, other);
    let observed = p_keep * p_sel + p_false * p_rest;
    if observed < HERALD_FLOOR {
        return Err(Error::HeraldImpossible {
            probability: observed,
        });
    }
    let rho = sel.rho() * num_complex::Complex64::new(p_keep / observed, 0.0)
        + rest.rho() * num_complex::Complex64::new(p_false / observed, 0.0);
    let state = HybridState::new(rho_pre.spin_dim(), rho_pre.n_max(), rho)?;
    Ok(HeraldedState {
        state,
        probability: p_sel,
        observed_probability: observed,
    })
}

/// Weight of the selected branch over the falsely heralded one,
/// `|N_sel|² / (P(false herald)·|N_other|²)`.
pub fn mixture_ratio(selected_weight: f64, other_weight: f64, p_false_herald: f64) -> f64 {
    selected_weight / (p_false_herald * other_weight)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureSummary {
    pub selected_weight: f64,
    pub other_weight: f64,
    pub ratio: f64,
}
