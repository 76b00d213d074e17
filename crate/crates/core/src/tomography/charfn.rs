//! Exact characteristic function `χ(β) = Tr(ρ D(β))`.
//!
//! Grids are evaluated in position space,
//! `χ(β) = ∫ ⟨y - u/2|ρ|y + u/2⟩ e^{ivy} dy` with `u = √2 β_r`, `v = √2 β_i`,
//! on a `y` lattice commensurate with the β lattice.

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::{PI, SQRT_2};

use super::grid::{Axis, CharGrid};
use crate::error::Result;
use crate::fock::action::{displace_ket, top_level};
use crate::fock::{OscState, TruncationPolicy};

/// Hermite functions `φ_n(x)` for `n < count`, one row per `x`.
///
/// The three-term recurrence runs on a rescaled value with its log scale
/// tracked separately so that `φ_0(x)` never underflows.
pub fn hermite_functions(xs: &[f64], count: usize) -> Array2<f64> {
    const BIG: f64 = 1e150;
    let log_big = BIG.ln();
    let mut out = Array2::zeros((xs.len(), count));
    out.outer_iter_mut()
        .into_par_iter()
        .zip(xs.par_iter())
        .for_each(|(mut row, &x)| {
            let mut log_scale = -0.5 * x * x - 0.25 * PI.ln();
            let mut prev = 0.0;
            let mut cur = 1.0;
            for n in 0..count {
                row[n] = if log_scale < -740.0 {
                    0.0
                } else {
                    cur * log_scale.exp()
                };
                let nf = n as f64;
                let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
                prev = cur;
                cur = next;
                if cur.abs() > BIG {
                    cur /= BIG;
                    prev /= BIG;
                    log_scale += log_big;
                }
            }
        });
    out
}

/// `y` lattice for a β axis: spacing `dβ/(√2 m)` and enough range for the
/// state's support plus the largest shift `u/2`.
struct Lattice {
    ys: Vec<f64>,
    h: f64,
    m: usize,
}

fn lattice(axis: &Axis, n_top: usize) -> Lattice {
    let p_state = (2.0 * n_top as f64 + 1.0).sqrt() + 6.0;
    let v_max = SQRT_2 * axis.extent;
    let h0 = axis.step() / SQRT_2;
    let target = PI / (2.0 * p_state + v_max);
    let m = (h0 / target).ceil().max(1.0) as usize;
    let h = h0 / m as f64;
    let half = p_state + axis.extent / SQRT_2;
    let k = (half / h).ceil() as i64;
    let ys = (-k..=k).map(|i| i as f64 * h).collect();
    Lattice { ys, h, m }
}

fn position_ket(phi: &Array2<f64>, c: ArrayView1<C64>) -> Array1<C64> {
    let re = phi.dot(&c.mapv(|z| z.re));
    let im = phi.dot(&c.mapv(|z| z.im));
    Array1::from_shape_fn(re.len(), |i| C64::new(re[i], im[i]))
}

fn position_density(phi: &Array2<f64>, rho: &Array2<C64>) -> Array2<C64> {
    let a_re = phi.dot(&rho.mapv(|z| z.re));
    let a_im = phi.dot(&rho.mapv(|z| z.im));
    let pt = phi.t();
    let re = a_re.dot(&pt);
    let im = a_im.dot(&pt);
    Array2::from_shape_fn(re.dim(), |(i, j)| C64::new(re[[i, j]], im[[i, j]]))
}

/// `χ` on every point of `axis × axis`.
pub fn char_grid_exact(state: &OscState, axis: Axis) -> Result<CharGrid> {
    char_grid_exact_with(state, axis, TruncationPolicy::default())
}

pub fn char_grid_exact_with(
    state: &OscState,
    axis: Axis,
    policy: TruncationPolicy,
) -> Result<CharGrid> {
    state.check_leakage(policy)?;
    let pops = state.fock_populations();
    let n_top = pops.iter().rposition(|p| *p > 1e-30).unwrap_or(0);
    let lat = lattice(&axis, n_top);
    let phi = hermite_functions(&lat.ys, state.dim());
    let ny = lat.ys.len();
    let nb = axis.points;
    let c = axis.center() as i64;

    enum Rep {
        Pure(Array1<C64>),
        Mixed(Array2<C64>),
    }
    let rep = match state {
        OscState::Pure(psi) => Rep::Pure(position_ket(&phi, psi.view())),
        OscState::Mixed(rho) => Rep::Mixed(position_density(&phi, rho)),
    };
    let pair = |p: usize, q: usize| -> C64 {
        match &rep {
            Rep::Pure(psi) => psi[p] * psi[q].conj(),
            Rep::Mixed(r) => r[[p, q]],
        }
    };

    // phase[b][i] = e^{i v_b y_i}
    let phases: Vec<Vec<C64>> = (0..nb)
        .into_par_iter()
        .map(|b| {
            let v = SQRT_2 * axis.coord(b);
            lat.ys.iter().map(|y| C64::from_polar(1.0, v * y)).collect()
        })
        .collect();

    let rows: Vec<Vec<C64>> = (0..nb)
        .into_par_iter()
        .map(|a| {
            let shift = (a as i64 - c) * lat.m as i64;
            let lo = shift.abs();
            let hi = ny as i64 - 1 - shift.abs();
            let idx: Vec<usize> = (lo..=hi).map(|i| i as usize).collect();
            let g: Vec<C64> = idx
                .iter()
                .map(|&i| pair((i as i64 - shift) as usize, (i as i64 + shift) as usize))
                .collect();
            (0..nb)
                .map(|b| {
                    let ph = &phases[b];
                    let mut acc = C64::new(0.0, 0.0);
                    for (gi, &i) in g.iter().zip(idx.iter()) {
                        acc += ph[i] * gi;
                    }
                    acc * lat.h
                })
                .collect()
        })
        .collect();
    let values = Array2::from_shape_fn((nb, nb), |(a, b)| rows[a][b]);
    CharGrid::new(axis, values)
}

/// `Tr(ρ D(β))` at a single point.
pub fn char_fn_exact(state: &OscState, beta: C64) -> Result<C64> {
    char_fn_exact_with(state, beta, TruncationPolicy::default())
}

pub fn char_fn_exact_with(state: &OscState, beta: C64, policy: TruncationPolicy) -> Result<C64> {
    state.check_leakage(policy)?;
    let mut total = C64::new(0.0, 0.0);
    for (w, psi) in state.components() {
        let moved = displace_ket(psi.view(), beta)?;
        let overlap: C64 = psi
            .iter()
            .zip(moved.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        total += overlap * w;
    }
    Ok(total)
}

/// Largest populated level of a state; sizes padded spaces.
pub(crate) fn state_top_level(state: &OscState) -> usize {
    match state {
        OscState::Pure(psi) => top_level(psi.view()),
        OscState::Mixed(_) => state
            .fock_populations()
            .iter()
            .rposition(|p| *p > 1e-30)
            .unwrap_or(0),
    }
}
