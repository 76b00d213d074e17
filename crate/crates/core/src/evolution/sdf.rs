//! Two detuned spin-dependent forces and the effective nonlinear interaction
//! they synthesize.
//!
//! Interaction-picture Hamiltonian (ħ = 1), one term per force:
//! `H_j(t) = (Ω_j/2) σ_j (a e^{-i(m_j Δ t + φ_j)} + a† e^{i(m_j Δ t + φ_j)})`.
//! The spin operators act on levels (0,1) only; a qutrit's level 2 is dark.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::linalg::{inner, outer};
use crate::fock::{HybridKet, HybridState, OscState, Pauli};

use super::nonlinear::NonlinearSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdfSpec {
    /// Spin conditioning; rotated towards the cyclic successor axis by `tilt`.
    pub axis: Pauli,
    pub tilt: f64,
    /// Rabi-type coupling, rad/s.
    pub omega: f64,
    /// Base detuning, rad/s.
    pub delta: f64,
    /// Detuning multiple: the force oscillates at `m·Δ`.
    pub m: i32,
    /// Oscillator phase, rad.
    pub phi: f64,
}

impl SdfSpec {
    pub fn new(axis: Pauli, omega: f64, delta: f64, m: i32, phi: f64) -> Result<Self> {
        if omega < 0.0 || !omega.is_finite() || !delta.is_finite() || !phi.is_finite() {
            return Err(Error::domain(
                "SDF coupling must be finite and non-negative",
            ));
        }
        Ok(Self {
            axis,
            tilt: 0.0,
            omega,
            delta,
            m,
            phi,
        })
    }

    pub fn with_tilt(mut self, tilt: f64) -> Self {
        self.tilt = tilt;
        self
    }

    /// Bloch vector in the textbook frame. The level convention puts `σ_z = -σ_z^std`.
    pub fn bloch(&self) -> [f64; 3] {
        let unit = |p: Pauli| match p {
            Pauli::X => [1.0, 0.0, 0.0],
            Pauli::Y => [0.0, 1.0, 0.0],
            Pauli::Z => [0.0, 0.0, -1.0],
        };
        let next = match self.axis {
            Pauli::X => Pauli::Y,
            Pauli::Y => Pauli::Z,
            Pauli::Z => Pauli::X,
        };
        let (a, b) = (unit(self.axis), unit(next));
        let (c, s) = (self.tilt.cos(), self.tilt.sin());
        [
            c * a[0] + s * b[0],
            c * a[1] + s * b[1],
            c * a[2] + s * b[2],
        ]
    }

    pub fn spin_matrix(&self) -> Array2<C64> {
        bloch_matrix(self.bloch())
    }
}

fn bloch_matrix(n: [f64; 3]) -> Array2<C64> {
    let i = C64::new(0.0, 1.0);
    let r = |x: f64| C64::new(x, 0.0);
    ndarray::array![
        [r(n[2]), r(n[0]) - i * n[1]],
        [r(n[0]) + i * n[1], r(-n[2])]
    ]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn angle_between(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
    let c = cross(a, b);
    (c.iter().map(|x| x * x).sum::<f64>().sqrt()).atan2(dot)
}

/// `Ω_k` for `k ∈ {2,3,4}`: `{Ω'Ω/Δ, Ω'Ω²/(2Δ²), Ω'Ω³/(8Δ³)}·sin θ`.
pub fn effective_coupling(
    k: usize,
    omega_a: f64,
    omega_ap: f64,
    delta: f64,
    theta: f64,
) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::domain("detuning must be non-zero"));
    }
    let base = match k {
        2 => omega_ap * omega_a / delta,
        3 => omega_ap * omega_a.powi(2) / (2.0 * delta.powi(2)),
        4 => omega_ap * omega_a.powi(3) / (8.0 * delta.powi(3)),
        _ => {
            return Err(Error::domain(format!(
                "effective coupling defined for k in 2..=4, got {k}"
            )))
        }
    };
    Ok(base * theta.sin())
}

/// Conditioning axis of the synthesized interaction: the commutator axis for
/// even `k`, the second force's axis for odd `k`.
pub fn effective_spin_basis(k: usize, sigma_a: Pauli, sigma_ap: Pauli) -> Result<Pauli> {
    let comm = sigma_a
        .commutator_axis(sigma_ap)
        .ok_or_else(|| Error::domain(format!("axes {sigma_a} and {sigma_ap} commute")))?;
    Ok(if k.is_multiple_of(2) { comm } else { sigma_ap })
}

/// Effective `k = 2` interaction of two forces with `m = 1` and `m' = -1`
/// acting for time `t`.
///
/// Second-order averaging gives
/// `H_eff = (Ω_aΩ_b/(4Δ)) [σ_a, σ_b] (a†² e^{iφ} - a² e^{-iφ})`, with `φ` the
/// second force's phase. Writing `[σ_a, σ_b] = 2i sin θ σ_β` this is a
/// σ_β-conditioned squeezer with `ζ = Ω₂ t e^{i(φ + π/2)}`. When `σ_β` is the
/// negative of a Pauli axis the sign is folded into `ζ`.
pub fn effective_squeeze(sdf_a: &SdfSpec, sdf_b: &SdfSpec, t: f64) -> Result<NonlinearSpec> {
    if sdf_a.m != 1 || sdf_b.m != -1 || sdf_a.delta != sdf_b.delta || sdf_a.phi != 0.0 {
        return Err(Error::domain(
            "effective squeezing mapping expects m = 1 / m' = -1, equal Δ, and φ_a = 0",
        ));
    }
    let (na, nb) = (sdf_a.bloch(), sdf_b.bloch());
    let theta = angle_between(na, nb);
    let omega2 = effective_coupling(2, sdf_a.omega, sdf_b.omega, sdf_a.delta, theta)?;
    let c = cross(na, nb);
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(Error::domain("force axes commute"));
    }
    let dir = [c[0] / norm, c[1] / norm, c[2] / norm];
    let candidates = [
        (Pauli::X, [1.0, 0.0, 0.0]),
        (Pauli::Y, [0.0, 1.0, 0.0]),
        (Pauli::Z, [0.0, 0.0, -1.0]),
    ];
    for (p, v) in candidates {
        let dot: f64 = dir.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        if (dot.abs() - 1.0).abs() < 1e-9 {
            let zeta = C64::from_polar(omega2.abs() * t, sdf_b.phi + std::f64::consts::FRAC_PI_2)
                * dot.signum();
            return NonlinearSpec::new(2, zeta, p);
        }
    }
    Err(Error::domain(
        "synthesized conditioning is not a coordinate axis",
    ))
}

struct Force {
    half_omega: f64,
    freq: f64,
    phi: f64,
    spin: Array2<C64>,
}

fn apply_hamiltonian(
    forces: &[Force],
    t: f64,
    psi: &Array1<C64>,
    spin_dim: usize,
    d: usize,
) -> Array1<C64> {
    let mut out = Array1::<C64>::zeros(psi.len());
    let sqrt: Vec<f64> = (0..=d).map(|n| (n as f64).sqrt()).collect();
    for f in forces {
        if f.half_omega == 0.0 {
            continue;
        }
        let e = C64::from_polar(1.0, -(f.freq * t + f.phi));
        // F_s = (e a + e* a†) ψ_s for s in {0, 1}
        let mut fb = [Array1::<C64>::zeros(d), Array1::<C64>::zeros(d)];
        for (s, fbs) in fb.iter_mut().enumerate() {
            let off = s * d;
            for n in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                if n + 1 < d {
                    acc += e * sqrt[n + 1] * psi[off + n + 1];
                }
                if n > 0 {
                    acc += e.conj() * sqrt[n] * psi[off + n - 1];
                }
                fbs[n] = acc;
            }
        }
        for a in 0..2 {
            for (s, fbs) in fb.iter().enumerate() {
                let c = f.spin[[a, s]] * f.half_omega;
                if c.norm() == 0.0 {
                    continue;
                }
                let mut dst = out.slice_mut(ndarray::s![a * d..(a + 1) * d]);
                dst.scaled_add(c, fbs);
            }
        }
    }
    let _ = spin_dim;
    out
}

fn rk4_ket(forces: &[Force], ket: &HybridKet, t: f64, steps: usize) -> Array1<C64> {
    let (sd, d) = (ket.spin_dim(), ket.osc_dim());
    let mi = C64::new(0.0, -1.0);
    let f = |time: f64, v: &Array1<C64>| apply_hamiltonian(forces, time, v, sd, d).mapv(|z| z * mi);
    let h = t / steps as f64;
    let mut psi = ket.amps().clone();
    for i in 0..steps {
        let t0 = i as f64 * h;
        let k1 = f(t0, &psi);
        let k2 = f(t0 + 0.5 * h, &(&psi + &k1.mapv(|z| z * (0.5 * h))));
        let k3 = f(t0 + 0.5 * h, &(&psi + &k2.mapv(|z| z * (0.5 * h))));
        let k4 = f(t0 + h, &(&psi + &k3.mapv(|z| z * h)));
        psi = psi + (k1 + k2.mapv(|z| z * 2.0) + k3.mapv(|z| z * 2.0) + k4).mapv(|z| z * (h / 6.0));
    }
    psi
}

fn forces_of(sdfs: &[&SdfSpec]) -> Vec<Force> {
    sdfs.iter()
        .map(|s| Force {
            half_omega: 0.5 * s.omega,
            freq: s.m as f64 * s.delta,
            phi: s.phi,
            spin: s.spin_matrix(),
        })
        .collect()
}

/// Integrates the two-force dynamics of a pure state with `steps` RK4 steps.
/// With `verify`, repeats at `2·steps` and requires the two results to agree
/// to fidelity `1 - 1e-8`.
pub fn evolve_full_sdf_ket(
    ket: &HybridKet,
    sdf1: &SdfSpec,
    sdf2: &SdfSpec,
    t: f64,
    steps: usize,
    verify: bool,
) -> Result<HybridKet> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::domain(
            "evolution time must be finite and non-negative",
        ));
    }
    if t == 0.0 {
        return Ok(ket.clone());
    }
    let steps = steps.max(1);
    let forces = forces_of(&[sdf1, sdf2]);
    let psi = rk4_ket(&forces, ket, t, steps);
    if verify {
        let fine = rk4_ket(&forces, ket, t, 2 * steps);
        let f = inner(&psi, &fine).norm_sqr() / (inner(&psi, &psi).re * inner(&fine, &fine).re);
        if f < 1.0 - 1e-8 {
            return Err(Error::Convergence(format!(
                "step halving changed the final state (fidelity {f:.3e}); increase steps beyond {steps}"
            )));
        }
    }
    HybridKet::new(ket.spin_dim(), ket.n_max(), psi)
}

/// Density-matrix form: each spectral component is integrated independently.
pub fn evolve_full_sdf(
    state: &HybridState,
    sdf1: &SdfSpec,
    sdf2: &SdfSpec,
    t: f64,
    steps: usize,
    verify: bool,
) -> Result<HybridState> {
    let comps = OscState::Mixed(state.rho().clone()).components();
    let dim = state.rho().nrows();
    let mut rho = Array2::<C64>::zeros((dim, dim));
    for (w, v) in comps {
        let k = HybridKet::new(state.spin_dim(), state.n_max(), v)?;
        let out = evolve_full_sdf_ket(&k, sdf1, sdf2, t, steps, verify)?;
        rho.scaled_add(C64::new(w, 0.0), &outer(out.amps(), out.amps()));
    }
    let mut st = HybridState::from_parts_unchecked(state.spin_dim(), state.n_max(), rho);
    st.hermitize();
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::nonlinear::{apply_conditioned_nonlinear_ket, SqueezeCache};
    use crate::fock::{fock_ket, make_displacement, TruncationPolicy};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    const TWO_PI: f64 = 2.0 * PI;

    #[test]
    fn coupling_formulas() {
        let (o, d) = (TWO_PI * 1e3, TWO_PI * 50e3);
        let o2 = effective_coupling(2, o, o, d, FRAC_PI_2).unwrap();
        let o3 = effective_coupling(3, o, o, d, FRAC_PI_2).unwrap();
        assert!((o2 / TWO_PI - 20.0).abs() < 1e-9);
        assert!((o3 / TWO_PI - 0.2).abs() < 1e-12);
        for k in 2..=4 {
            assert_eq!(effective_coupling(k, o, o, d, 0.0).unwrap(), 0.0);
        }
        assert!(effective_coupling(2, o, o, 0.0, 1.0).is_err());
    }

    #[test]
    fn spin_basis_rule() {
        assert_eq!(
            effective_spin_basis(2, Pauli::X, Pauli::Y).unwrap(),
            Pauli::Z
        );
        assert_eq!(
            effective_spin_basis(4, Pauli::X, Pauli::Y).unwrap(),
            Pauli::Z
        );
        assert_eq!(
            effective_spin_basis(3, Pauli::X, Pauli::Y).unwrap(),
            Pauli::Y
        );
        assert_eq!(
            effective_spin_basis(3, Pauli::X, Pauli::Z).unwrap(),
            Pauli::Z
        );
        assert!(effective_spin_basis(2, Pauli::X, Pauli::X).is_err());
    }

    #[test]
    fn tilt_sets_angle() {
        let a = SdfSpec::new(Pauli::X, 1.0, 1.0, 1, 0.0).unwrap();
        let b = a.with_tilt(0.3);
        assert!((angle_between(a.bloch(), b.bloch()) - 0.3).abs() < 1e-12);
        let z = SdfSpec::new(Pauli::Z, 1.0, 1.0, 1, 0.0).unwrap();
        let m = z.spin_matrix();
        assert_eq!(m[[0, 0]], C64::new(-1.0, 0.0));
    }

    #[test]
    fn resonant_force_displaces_branches() {
        let n_max = 40;
        let omega = 2.0;
        let t = 1.0; // Ωt/2 = 1
        let sdf1 = SdfSpec::new(Pauli::Z, omega, 0.0, 1, 0.0).unwrap();
        let off = SdfSpec::new(Pauli::X, 0.0, 0.0, 1, 0.0).unwrap();
        let mut ket = HybridKet::product(2, 0, &fock_ket(0, n_max + 1)).unwrap();
        ket.amps_mut()[0] = C64::new(FRAC_1_SQRT_2, 0.0);
        ket.amps_mut()[n_max + 1] = C64::new(FRAC_1_SQRT_2, 0.0);
        let out = evolve_full_sdf_ket(&ket, &sdf1, &off, t, 400, true).unwrap();
        // exp(-i s (a + a†)) = D(-i s) for branch eigenvalue s; |0_s⟩ has s = -1.
        let d_plus_i = make_displacement(C64::new(0.0, 1.0), n_max)
            .unwrap()
            .matrix()
            .column(0)
            .to_owned();
        let d_minus_i = make_displacement(C64::new(0.0, -1.0), n_max)
            .unwrap()
            .matrix()
            .column(0)
            .to_owned();
        let b0 = out.block(0).to_owned().mapv(|z| z * 2f64.sqrt());
        let b1 = out.block(1).to_owned().mapv(|z| z * 2f64.sqrt());
        assert!(inner(&d_plus_i, &b0).norm_sqr() > 1.0 - 1e-8);
        assert!(inner(&d_minus_i, &b1).norm_sqr() > 1.0 - 1e-8);
    }

    #[test]
    fn zero_time_identity() {
        let ket = HybridKet::product(2, 1, &fock_ket(2, 6)).unwrap();
        let s = SdfSpec::new(Pauli::X, 1.0, 3.0, 1, 0.0).unwrap();
        assert_eq!(
            evolve_full_sdf_ket(&ket, &s, &s, 0.0, 10, false).unwrap(),
            ket
        );
    }

    #[test]
    fn too_few_steps_fail_verification() {
        let ket = HybridKet::product(2, 0, &fock_ket(0, 21)).unwrap();
        let a = SdfSpec::new(Pauli::X, 1.0, 20.0, 1, 0.0).unwrap();
        let b = SdfSpec::new(Pauli::Y, 1.0, 20.0, -1, 0.0).unwrap();
        let err = evolve_full_sdf_ket(&ket, &a, &b, 2.0, 20, true).unwrap_err();
        assert!(matches!(err, Error::Convergence(_)));
    }

    #[test]
    fn synthesized_squeezing_matches_effective_model() {
        let n_max = 50;
        let (omega, ratio, zeta) = (1.0, 20.0, 0.5);
        let delta = ratio * omega;
        let a = SdfSpec::new(Pauli::X, omega, delta, 1, 0.0).unwrap();
        let b = SdfSpec::new(Pauli::Y, omega, delta, -1, 0.0).unwrap();
        let t = zeta / effective_coupling(2, omega, omega, delta, FRAC_PI_2).unwrap();
        let eff = effective_squeeze(&a, &b, t).unwrap();
        assert_eq!(eff.cond, Pauli::Z);
        assert!((eff.zeta.norm() - zeta).abs() < 1e-12);
        let mut ket = HybridKet::product(2, 0, &fock_ket(0, n_max + 1)).unwrap();
        ket.amps_mut()[0] = C64::new(FRAC_1_SQRT_2, 0.0);
        ket.amps_mut()[n_max + 1] = C64::new(FRAC_1_SQRT_2, 0.0);
        let steps = (60.0 * delta * t) as usize;
        let full = evolve_full_sdf_ket(&ket, &a, &b, t, steps, false).unwrap();
        let cache = SqueezeCache::new();
        let target =
            apply_conditioned_nonlinear_ket(&ket, &eff, &cache, TruncationPolicy::default())
                .unwrap();
        let f = inner(target.amps(), full.amps()).norm_sqr();
        assert!(f >= 0.98, "fidelity {f}");
    }
}
