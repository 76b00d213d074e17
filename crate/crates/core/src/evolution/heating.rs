//! Motional heating as the symmetric dissipator `ṅ(D[a] + D[a†])`.
//!
//! On the truncated space `aa†` has a zero in its top diagonal entry, which
//! keeps the generator exactly trace preserving.

use ndarray::{Array2, Zip};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{HybridState, TruncationPolicy};

pub const CPTP_TOL: f64 = 1e-7;
pub const MAX_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Initial thermal occupation.
    pub nbar0: f64,
    /// Heating rate in quanta per second.
    pub ndot: f64,
    pub enabled: bool,
}

impl NoiseSpec {
    pub fn off() -> Self {
        Self {
            nbar0: 0.0,
            ndot: 0.0,
            enabled: false,
        }
    }

    pub fn new(nbar0: f64, ndot: f64) -> Result<Self> {
        if (ndot.is_nan() || ndot < 0.0) || (nbar0.is_nan() || nbar0 < 0.0) {
            return Err(Error::domain("noise parameters must be non-negative"));
        }
        Ok(Self {
            nbar0,
            ndot,
            enabled: true,
        })
    }

    /// `n̄₀ = 0.1`, `ṅ = 300 /s`.
    pub fn experimental() -> Self {
        Self {
            nbar0: 0.1,
            ndot: 300.0,
            enabled: true,
        }
    }

    pub fn heating_rate(&self) -> f64 {
        if self.enabled {
            self.ndot
        } else {
            0.0
        }
    }
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::off()
    }
}

/// Step count for a duration: step `min(1 µs, t/100)`.
pub fn default_steps(t: f64) -> usize {
    if t <= 0.0 {
        return 0;
    }
    let step = MAX_STEP.min(t / 100.0);
    (t / step * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Per-index ladder factors of the dissipator on a `spin ⊗ osc` matrix.
struct Ladder {
    /// `ν_m = 2m + 1` below the cutoff, `n_max` at it.
    nu: Vec<f64>,
    /// `√(m+1)` below the cutoff, 0 at it.
    up: Vec<f64>,
    /// `√m`.
    down: Vec<f64>,
}

impl Ladder {
    fn new(dim: usize, d: usize) -> Self {
        let n_max = d - 1;
        let level = |i: usize| i % d;
        Self {
            nu: (0..dim)
                .map(|i| {
                    if level(i) < n_max {
                        2.0 * level(i) as f64 + 1.0
                    } else {
                        n_max as f64
                    }
                })
                .collect(),
            up: (0..dim)
                .map(|i| {
                    if level(i) < n_max {
                        ((level(i) + 1) as f64).sqrt()
                    } else {
                        0.0
                    }
                })
                .collect(),
            down: (0..dim).map(|i| (level(i) as f64).sqrt()).collect(),
        }
    }
}

/// `out = L(ρ)/ṅ`, applied to every spin block.
fn dissipator_into(rho: &[C64], lad: &Ladder, out: &mut Array2<C64>) {
    let n = lad.nu.len();
    Zip::indexed(out.rows_mut()).par_for_each(|i, mut row| {
        let row = row.as_slice_mut().expect("contiguous row");
        let cur = &rho[i * n..(i + 1) * n];
        let (nu_i, up_i, down_i) = (lad.nu[i], lad.up[i], lad.down[i]);
        for j in 0..n {
            row[j] = cur[j] * (-0.5 * (nu_i + lad.nu[j]));
        }
        if up_i != 0.0 {
            let next = &rho[(i + 1) * n..(i + 2) * n];
            for j in 0..n - 1 {
                row[j] += next[j + 1] * (up_i * lad.up[j]);
            }
        }
        if down_i != 0.0 {
            let prev = &rho[(i - 1) * n..i * n];
            for j in 1..n {
                row[j] += prev[j - 1] * (down_i * lad.down[j]);
            }
        }
    });
}

/// RK4 integrator with reusable stage buffers.
pub(crate) struct HeatingStepper {
    lad: Ladder,
    k: Array2<C64>,
    stage: Array2<C64>,
    acc: Array2<C64>,
}

impl HeatingStepper {
    pub(crate) fn for_state(state: &HybridState) -> Self {
        let (dim, d) = (state.spin_dim() * state.osc_dim(), state.osc_dim());
        let z = || Array2::zeros((dim, dim));
        Self {
            lad: Ladder::new(dim, d),
            k: z(),
            stage: z(),
            acc: z(),
        }
    }

    /// One RK4 step of `dρ/dt = ṅ L(ρ)`, in place.
    pub(crate) fn step(&mut self, rho: &mut Array2<C64>, ndot: f64, dt: f64) {
        let h = ndot * dt;
        self.acc.fill(C64::new(0.0, 0.0));
        let src = rho.as_slice().expect("standard layout");
        dissipator_into(src, &self.lad, &mut self.k);
        self.acc.scaled_add(C64::new(1.0, 0.0), &self.k);
        Zip::from(&mut self.stage)
            .and(&*rho)
            .and(&self.k)
            .for_each(|s, r, k| *s = r + k * (0.5 * h));
        for (weight, frac) in [(2.0, 0.5), (2.0, 1.0), (1.0, 0.0)] {
            dissipator_into(
                self.stage.as_slice().expect("standard layout"),
                &self.lad,
                &mut self.k,
            );
            self.acc.scaled_add(C64::new(weight, 0.0), &self.k);
            if frac > 0.0 {
                Zip::from(&mut self.stage)
                    .and(&*rho)
                    .and(&self.k)
                    .for_each(|s, r, k| *s = r + k * (frac * h));
            }
        }
        rho.scaled_add(C64::new(h / 6.0, 0.0), &self.acc);
    }
}

pub(crate) fn heat_in_place(
    state: &mut HybridState,
    stepper: &mut HeatingStepper,
    ndot: f64,
    dt: f64,
) {
    if ndot == 0.0 || dt == 0.0 {
        return;
    }
    let rho = state.rho_mut();
    if !rho.is_standard_layout() {
        *rho = rho.as_standard_layout().into_owned();
    }
    stepper.step(rho, ndot, dt);
}

pub(crate) fn finish_noisy(state: &mut HybridState, policy: TruncationPolicy) -> Result<()> {
    state.hermitize();
    state.check_leakage(policy)?;
    let min = state.min_eigenvalue();
    if min < -CPTP_TOL {
        return Err(Error::Cptp {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

/// Heats `state` for duration `t` using `steps` RK4 steps.
pub fn apply_heating(state: &HybridState, ndot: f64, t: f64, steps: usize) -> Result<HybridState> {
    apply_heating_with(state, ndot, t, steps, TruncationPolicy::default())
}

pub fn apply_heating_with(
    state: &HybridState,
    ndot: f64,
    t: f64,
    steps: usize,
    policy: TruncationPolicy,
) -> Result<HybridState> {
    if (ndot.is_nan() || ndot < 0.0) || (t.is_nan() || t < 0.0) {
        return Err(Error::domain(
            "heating rate and duration must be non-negative",
        ));
    }
    let mut out = state.clone();
    if ndot == 0.0 || t == 0.0 {
        return Ok(out);
    }
    let steps = steps.max(1);
    let dt = t / steps as f64;
    let mut stepper = HeatingStepper::for_state(&out);
    for _ in 0..steps {
        heat_in_place(&mut out, &mut stepper, ndot, dt);
    }
    finish_noisy(&mut out, policy)?;
    Ok(out)
}

/// Second-order splitting of a sliced unitary with heating:
/// `H(dt/2) U H(dt) U … U H(dt/2)` over `slices` slices of total duration `t`.
pub(crate) fn split_evolve<F>(
    state: &HybridState,
    ndot: f64,
    t: f64,
    slices: usize,
    mut unitary_slice: F,
) -> Result<HybridState>
where
    F: FnMut(&HybridState) -> Result<HybridState>,
{
    let slices = slices.max(1);
    let dt = t / slices as f64;
    let mut st = state.clone();
    let mut stepper = HeatingStepper::for_state(&st);
    heat_in_place(&mut st, &mut stepper, ndot, 0.5 * dt);
    for i in 0..slices {
        st = unitary_slice(&st)?;
        let h = if i + 1 == slices { 0.5 * dt } else { dt };
        heat_in_place(&mut st, &mut stepper, ndot, h);
    }
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::OscState;
    use approx::assert_abs_diff_eq;

    fn mean_phonon(st: &HybridState) -> f64 {
        st.fock_populations()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    #[test]
    fn vacuum_heating_rate() {
        let st = HybridState::product(2, 0, &OscState::vacuum(30)).unwrap();
        let out = apply_heating(&st, 300.0, 1e-3, 1000).unwrap();
        assert_abs_diff_eq!(mean_phonon(&out), 0.3, epsilon = 1e-3);
        assert!((out.trace().re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_rate_is_identity() {
        let st = HybridState::product(2, 1, &OscState::fock(2, 10)).unwrap();
        assert_eq!(apply_heating(&st, 0.0, 1e-3, 10).unwrap(), st);
    }

    #[test]
    fn coherences_between_spin_blocks_decay_consistently() {
        // The dissipator acts on the oscillator only, so the spin coherence of
        // (|0⟩+|1⟩)|0⟩ decays exactly like the vacuum population.
        let mut st = HybridState::product(2, 0, &OscState::vacuum(20)).unwrap();
        let d = st.osc_dim();
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            st.rho_mut()[[a * d, b * d]] = C64::new(0.5, 0.0);
        }
        let out = apply_heating(&st, 300.0, 5e-4, 500).unwrap();
        let p00 = out.block(0, 0)[[0, 0]].re;
        let c00 = out.block(0, 1)[[0, 0]].re;
        assert_abs_diff_eq!(p00, c00, epsilon = 1e-14);
    }

    #[test]
    fn default_step_rule() {
        assert_eq!(default_steps(1e-3), 1000);
        assert_eq!(default_steps(50e-6), 100);
        assert_eq!(default_steps(0.0), 0);
    }
}
