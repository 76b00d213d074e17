//! Scalar figures of merit for oscillator states and Wigner grids.

use serde::{Deserialize, Serialize};

use ndarray::Array1;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::action::displace_ket;
use crate::fock::{OscState, TruncationPolicy};
use crate::tomography::{rotate_wigner, window_wigner, WignerGrid};

/// Minimum enclosed mass for a grid to count as covering the state.
pub const COVERAGE_MIN: f64 = 0.99;
/// Default window mass fraction.
pub const WINDOW_FRACTION: f64 = 0.95;

/// `(|N₊|², |N₋|²) = ((2 ± 2/√cosh(2|ζ|))/4)` for `k = 2`.
pub fn normalization_coeff_closed(zeta2_abs: f64) -> Result<(f64, f64)> {
    if zeta2_abs.is_nan() || zeta2_abs < 0.0 {
        return Err(Error::domain("squeezing magnitude must be non-negative"));
    }
    let o = 1.0 / (2.0 * zeta2_abs).cosh().sqrt();
    Ok(((2.0 + 2.0 * o) / 4.0, (2.0 - 2.0 * o) / 4.0))
}

fn check_coverage(w: &WignerGrid) -> Result<f64> {
    let mass = w.total_mass();
    if mass < COVERAGE_MIN {
        return Err(Error::Coverage(format!(
            "grid holds {mass:.4} of the Wigner mass (need {COVERAGE_MIN}); enlarge the grid"
        )));
    }
    Ok(mass)
}

/// `ln ∬|W| dx dp` over the whole grid.
pub fn wln(w: &WignerGrid) -> Result<f64> {
    check_coverage(w)?;
    Ok(w.integrate_with(f64::abs).ln())
}

/// WLN restricted to the smallest centered square holding `fraction` of the
/// mass: `ln(1 + ∬_win (|W| - W))`, i.e. only negative volume inside the
/// window counts. Returns the value and the window half-width.
pub fn wln_windowed(w: &WignerGrid, fraction: f64) -> Result<(f64, f64)> {
    check_coverage(w)?;
    let win = window_wigner(w, fraction);
    let neg = win.grid.integrate_with(|v| v.abs() - v);
    Ok((neg.ln_1p(), win.half_width))
}

pub fn min_wigner(w: &WignerGrid) -> f64 {
    w.values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Marginal moments `(⟨x⟩, ⟨p⟩, ⟨x²⟩, ⟨p²⟩, ⟨xp⟩)` normalized by the grid mass.
fn moments(w: &WignerGrid) -> [f64; 5] {
    let ax = w.axis;
    let xs = ax.coords();
    let wt = ax.weights();
    let mut m = [0.0; 6];
    for a in 0..ax.points {
        for b in 0..ax.points {
            let v = wt[a] * wt[b] * w.values[[a, b]];
            let (x, p) = (xs[a], xs[b]);
            m[0] += v;
            m[1] += v * x;
            m[2] += v * p;
            m[3] += v * x * x;
            m[4] += v * p * p;
            m[5] += v * x * p;
        }
    }
    [
        m[1] / m[0],
        m[2] / m[0],
        m[3] / m[0],
        m[4] / m[0],
        m[5] / m[0],
    ]
}

/// Variances of the `x` and `p` marginals.
pub fn quadrature_variances(w: &WignerGrid) -> (f64, f64) {
    let [mx, mp, xx, pp, _] = moments(w);
    (xx - mx * mx, pp - mp * mp)
}

/// Angle of the major principal axis of the covariance matrix.
pub fn principal_angle(w: &WignerGrid) -> f64 {
    let [mx, mp, xx, pp, xp] = moments(w);
    let (vx, vp, c) = (xx - mx * mx, pp - mp * mp, xp - mx * mp);
    0.5 * (2.0 * c).atan2(vx - vp)
}

/// Marginal variances after rotating the grid so its principal axes lie on
/// `x` (minor) and `p` (major).
pub fn aligned_quadrature_variances(w: &WignerGrid) -> (f64, f64) {
    let major = principal_angle(w);
    let aligned = rotate_wigner(w, std::f64::consts::FRAC_PI_2 - major);
    quadrature_variances(&aligned)
}

/// Covariance eigenvalues of `(x, p)` from `⟨a⟩`, `⟨a²⟩` and `⟨a†a⟩`: minor, major.
pub fn operator_principal_variances(state: &OscState) -> Result<(f64, f64)> {
    let rho = state.rho();
    let dim = rho.nrows();
    let (mut a, mut a2, mut n) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), 0.0);
    for k in 0..dim {
        let kf = k as f64;
        n += kf * rho[[k, k]].re;
        if k >= 1 {
            a += rho[[k, k - 1]] * kf.sqrt();
        }
        if k >= 2 {
            a2 += rho[[k, k - 2]] * (kf * (kf - 1.0)).sqrt();
        }
    }
    let (mx, mp) = (2f64.sqrt() * a.re, 2f64.sqrt() * a.im);
    let vx = a2.re + n + 0.5 - mx * mx;
    let vp = -a2.re + n + 0.5 - mp * mp;
    let c = a2.im - mx * mp;
    let half = (0.25 * (vx - vp).powi(2) + c * c).sqrt();
    Ok((0.5 * (vx + vp) - half, 0.5 * (vx + vp) + half))
}

/// Local maxima of `|χ(β)|` on the circle `|β| = radius`, sampled at `samples` angles.
pub fn char_maxima_on_circle(state: &OscState, radius: f64, samples: usize) -> Result<usize> {
    if samples < 3 {
        return Err(Error::domain("need at least 3 samples"));
    }
    state.check_leakage(TruncationPolicy::default())?;
    let comps: Vec<(f64, Array1<C64>)> = state
        .components()
        .into_iter()
        .filter(|(w, _)| *w > 1e-14)
        .collect();
    let vals: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
            let beta = C64::from_polar(radius, angle);
            let mut chi = C64::new(0.0, 0.0);
            for (w, psi) in &comps {
                let moved = displace_ket(psi.view(), beta)?;
                chi += psi
                    .iter()
                    .zip(moved.iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum::<C64>()
                    * *w;
            }
            Ok(chi.norm())
        })
        .collect::<Result<_>>()?;
    let n = samples;
    Ok((0..n)
        .filter(|&i| vals[i] > vals[(i + n - 1) % n] && vals[i] >= vals[(i + 1) % n])
        .count())
}

/// Diagonal of `ρ` up to and including `n_cut`.
pub fn fock_populations(state: &OscState, n_cut: usize) -> Result<Vec<f64>> {
    if n_cut > state.n_max() {
        return Err(Error::index(format!(
            "n_cut {n_cut} exceeds n_max {}",
            state.n_max()
        )));
    }
    Ok(state.fock_populations()[..=n_cut].to_vec())
}

/// Total population on levels outside `{offset + period·j}`.
pub fn off_lattice_mass(pops: &[f64], period: usize, offset: usize) -> f64 {
    pops.iter()
        .enumerate()
        .filter(|(n, _)| *n < offset || !(n - offset).is_multiple_of(period))
        .map(|(_, p)| *p)
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// WLN on the 0.95-mass window.
    pub wln: f64,
    pub wln_unwindowed: f64,
    pub window_half_width: f64,
    pub min_w: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub mean_phonon: f64,
    pub fock_populations: Vec<f64>,
    pub herald_probability: f64,
}

impl MetricsReport {
    /// Populations are reported up to the last level above `1e-12`.
    pub fn compute(state: &OscState, w: &WignerGrid, herald_probability: f64) -> Result<Self> {
        let (wl, half) = wln_windowed(w, WINDOW_FRACTION)?;
        let (var_x, var_p) = aligned_quadrature_variances(w);
        let pops = state.fock_populations();
        let cut = pops.iter().rposition(|p| *p > 1e-12).unwrap_or(0);
        Ok(Self {
            wln: wl,
            wln_unwindowed: wln(w)?,
            window_half_width: half,
            min_w: min_wigner(w),
            var_x,
            var_p,
            mean_phonon: state.mean_phonon(),
            fock_populations: pops[..=cut].to_vec(),
            herald_probability,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{constituent_state, TruncationPolicy};

    #[test]
    fn operator_variances_of_squeezed_vacuum() {
        let r: f64 = 0.6;
        let v = constituent_state(2, C64::new(r, 0.0), 120, TruncationPolicy::default()).unwrap();
        let (lo, hi) = operator_principal_variances(&OscState::from_ket(v).unwrap()).unwrap();
        // vacuum variance 1/2 scaled by e^{∓2r}
        assert!((lo - 0.5 * (-2.0 * r).exp()).abs() < 1e-9);
        assert!((hi - 0.5 * (2.0 * r).exp()).abs() < 1e-9);
    }

    #[test]
    fn squeezed_vacuum_has_two_maxima() {
        let v = constituent_state(2, C64::new(0.5, 0.0), 80, TruncationPolicy::default()).unwrap();
        let st = OscState::from_ket(v).unwrap();
        assert_eq!(char_maxima_on_circle(&st, 1.0, 360).unwrap(), 2);
        assert!(char_maxima_on_circle(&st, 1.0, 2).is_err());
    }
    use crate::tomography::{char_grid_exact, reconstruct_wigner, Axis};
    use std::f64::consts::FRAC_1_PI;

    #[test]
    fn closed_form_values() {
        assert_eq!(normalization_coeff_closed(0.0).unwrap(), (1.0, 0.0));
        let (p, m) = normalization_coeff_closed(1.12).unwrap();
        let oracle = 1.0 / ((2.0 * 1.12f64).exp() / 2.0 + (-2.0 * 1.12f64).exp() / 2.0).sqrt();
        assert!((p - (0.5 + 0.5 * oracle)).abs() < 1e-15);
        assert!((p - 0.72942).abs() < 1e-5 && (m - 0.27058).abs() < 1e-5);
        let (p, m) = normalization_coeff_closed(20.0).unwrap();
        assert!((p - 0.5).abs() < 1e-8 && (m - 0.5).abs() < 1e-8);
        assert!(normalization_coeff_closed(-1.0).is_err());
    }

    #[test]
    fn vacuum_and_fock_metrics() {
        let ax = Axis::new(6.0, 201).unwrap();
        let vac = reconstruct_wigner(&char_grid_exact(&OscState::vacuum(40), ax).unwrap()).unwrap();
        assert!(wln(&vac).unwrap().abs() < 1e-3);
        assert!(min_wigner(&vac) > -1e-6);
        let (vx, vp) = quadrature_variances(&vac);
        assert!((vx - 0.5).abs() < 1e-3 && (vp - 0.5).abs() < 1e-3);
        let one =
            reconstruct_wigner(&char_grid_exact(&OscState::fock(1, 40), ax).unwrap()).unwrap();
        assert!((min_wigner(&one) + FRAC_1_PI).abs() < 1e-3);
        let (wl, _) = wln_windowed(&one, WINDOW_FRACTION).unwrap();
        assert!(wl > 0.0 && wl <= wln(&one).unwrap() + 1e-12);
        let (wv, half) = wln_windowed(&vac, WINDOW_FRACTION).unwrap();
        assert!(wv.abs() < 1e-6);
        assert!((half - 1.585).abs() <= ax.step() * std::f64::consts::SQRT_2);
    }

    #[test]
    fn coverage_error_on_small_grid() {
        let ax = Axis::new(6.0, 201).unwrap();
        let chi = char_grid_exact(&OscState::vacuum(40), ax).unwrap();
        let w =
            crate::tomography::reconstruct_wigner_on(&chi, Axis::new(1.0, 41).unwrap()).unwrap();
        assert!(matches!(wln(&w), Err(Error::Coverage(_))));
    }

    #[test]
    fn lattice_mass() {
        let pops = [0.5, 0.0, 0.3, 1e-3, 0.2];
        assert!((off_lattice_mass(&pops, 2, 0) - 1e-3).abs() < 1e-15);
        assert!((off_lattice_mass(&pops, 4, 2) - (0.5 + 1e-3 + 0.2)).abs() < 1e-15);
    }
}
