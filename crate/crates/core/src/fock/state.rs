//! Hybrid spin ⊗ oscillator states. Index of `|s⟩⊗|n⟩` is `s·(n_max+1) + n`.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, ArrayViewMut2};
use num_complex::Complex64 as C64;

use super::linalg::{eigh, inner, outer, spectral_components};
use super::operator::Operator;
use super::truncation::TruncationPolicy;
use crate::error::{Error, Result};

pub const TRACE_TOL: f64 = 1e-9;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-9;

fn check_dims(spin_dim: usize, n_max: usize) -> Result<()> {
    if !(2..=3).contains(&spin_dim) {
        return Err(Error::domain(format!(
            "spin dimension must be 2 or 3, got {spin_dim}"
        )));
    }
    if n_max < 1 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    Ok(())
}

/// Oscillator-only state.
#[derive(Clone, Debug, PartialEq)]
pub enum OscState {
    Pure(Array1<C64>),
    Mixed(Array2<C64>),
}

impl OscState {
    pub fn vacuum(n_max: usize) -> Self {
        Self::fock(0, n_max)
    }

    pub fn fock(n: usize, n_max: usize) -> Self {
        OscState::Pure(super::operator::fock_ket(n, n_max + 1))
    }

    /// Normalizes a ket; errors on a zero vector.
    pub fn from_ket(mut ket: Array1<C64>) -> Result<Self> {
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState(
                "oscillator ket has zero or non-finite norm".into(),
            ));
        }
        ket.mapv_inplace(|z| z / norm);
        Ok(OscState::Pure(ket))
    }

    pub fn dim(&self) -> usize {
        match self {
            OscState::Pure(k) => k.len(),
            OscState::Mixed(r) => r.nrows(),
        }
    }

    pub fn n_max(&self) -> usize {
        self.dim() - 1
    }

    pub fn rho(&self) -> Array2<C64> {
        match self {
            OscState::Pure(k) => outer(k, k),
            OscState::Mixed(r) => r.clone(),
        }
    }

    pub fn fock_populations(&self) -> Vec<f64> {
        match self {
            OscState::Pure(k) => k.iter().map(|z| z.norm_sqr()).collect(),
            OscState::Mixed(r) => r.diag().iter().map(|z| z.re).collect(),
        }
    }

    pub fn mean_phonon(&self) -> f64 {
        self.fock_populations()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    pub fn purity(&self) -> f64 {
        match self {
            OscState::Pure(k) => k.iter().map(|z| z.norm_sqr()).sum::<f64>().powi(2),
            OscState::Mixed(r) => r.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    pub fn expectation(&self, op: &Operator) -> C64 {
        match self {
            OscState::Pure(k) => inner(k, &op.apply(k.view())),
            OscState::Mixed(r) => op.matrix().dot(r).diag().sum(),
        }
    }

    /// Weighted pure components; a pure state yields itself with weight 1.
    pub fn components(&self) -> Vec<(f64, Array1<C64>)> {
        match self {
            OscState::Pure(k) => vec![(1.0, k.clone())],
            OscState::Mixed(r) => spectral_components(r, 1e-14),
        }
    }

    /// `⟨ψ|ρ|ψ⟩` against a pure target.
    pub fn fidelity_with_ket(&self, target: &Array1<C64>) -> f64 {
        match self {
            OscState::Pure(k) => inner(target, k).norm_sqr(),
            OscState::Mixed(r) => inner(target, &r.dot(target)).re,
        }
    }

    pub fn check_leakage(&self, policy: TruncationPolicy) -> Result<()> {
        policy.check(self.fock_populations(), self.n_max())
    }
}

/// Thermal oscillator state with populations `∝ (n̄/(n̄+1))^n`, renormalized on `0..=n_max`.
pub fn thermal_state(nbar: f64, n_max: usize) -> Result<OscState> {
    if nbar < 0.0 || !nbar.is_finite() {
        return Err(Error::domain(format!(
            "thermal occupation must be non-negative, got {nbar}"
        )));
    }
    if n_max < 1 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    if nbar == 0.0 {
        return Ok(OscState::vacuum(n_max));
    }
    let q = nbar / (nbar + 1.0);
    let weights: Vec<f64> = (0..=n_max).map(|n| q.powi(n as i32)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = Array2::zeros((n_max + 1, n_max + 1));
    for (n, w) in weights.iter().enumerate() {
        rho[[n, n]] = C64::new(w / total, 0.0);
    }
    Ok(OscState::Mixed(rho))
}

/// Pure hybrid state.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridKet {
    spin_dim: usize,
    n_max: usize,
    amps: Array1<C64>,
}

impl HybridKet {
    pub fn new(spin_dim: usize, n_max: usize, amps: Array1<C64>) -> Result<Self> {
        check_dims(spin_dim, n_max)?;
        if amps.len() != spin_dim * (n_max + 1) {
            return Err(Error::domain("amplitude vector has wrong length"));
        }
        Ok(Self {
            spin_dim,
            n_max,
            amps,
        })
    }

    pub fn product(spin_dim: usize, spin_level: usize, osc: &Array1<C64>) -> Result<Self> {
        let n_max = osc.len().saturating_sub(1);
        check_dims(spin_dim, n_max)?;
        if spin_level >= spin_dim {
            return Err(Error::index(format!(
                "spin level {spin_level} outside spin dimension {spin_dim}"
            )));
        }
        let d = n_max + 1;
        let mut amps = Array1::zeros(spin_dim * d);
        amps.slice_mut(s![spin_level * d..(spin_level + 1) * d])
            .assign(osc);
        Ok(Self {
            spin_dim,
            n_max,
            amps,
        })
    }

    pub fn spin_dim(&self) -> usize {
        self.spin_dim
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn osc_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn amps(&self) -> &Array1<C64> {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut Array1<C64> {
        &mut self.amps
    }

    pub fn block(&self, s: usize) -> ArrayView1<'_, C64> {
        let d = self.osc_dim();
        self.amps.slice(s![s * d..(s + 1) * d])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn spin_probs(&self) -> Vec<f64> {
        (0..self.spin_dim)
            .map(|s| self.block(s).iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    pub fn fock_populations(&self) -> Vec<f64> {
        let mut pops = vec![0.0; self.osc_dim()];
        for s in 0..self.spin_dim {
            for (n, z) in self.block(s).iter().enumerate() {
                pops[n] += z.norm_sqr();
            }
        }
        pops
    }

    pub fn to_density(&self) -> HybridState {
        HybridState {
            spin_dim: self.spin_dim,
            n_max: self.n_max,
            rho: outer(&self.amps, &self.amps),
        }
    }

    /// Oscillator reduced state; pure when only one spin block is populated.
    pub fn reduced_oscillator(&self) -> OscState {
        let populated: Vec<usize> = (0..self.spin_dim)
            .filter(|&s| self.block(s).iter().any(|z| z.norm_sqr() > 0.0))
            .collect();
        if populated.len() == 1 {
            return OscState::Pure(self.block(populated[0]).to_owned());
        }
        let d = self.osc_dim();
        let mut rho = Array2::zeros((d, d));
        for s in 0..self.spin_dim {
            let b = self.block(s).to_owned();
            rho += &outer(&b, &b);
        }
        OscState::Mixed(rho)
    }

    pub fn check_leakage(&self, policy: TruncationPolicy) -> Result<()> {
        policy.check(self.fock_populations(), self.n_max)
    }
}

/// Density matrix over spin ⊗ oscillator.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridState {
    spin_dim: usize,
    n_max: usize,
    rho: Array2<C64>,
}

impl HybridState {
    /// Validates trace and hermiticity; positivity is checked by [`Self::validate_positive`].
    pub fn new(spin_dim: usize, n_max: usize, rho: Array2<C64>) -> Result<Self> {
        check_dims(spin_dim, n_max)?;
        let dim = spin_dim * (n_max + 1);
        if rho.dim() != (dim, dim) {
            return Err(Error::domain(format!("density matrix must be {dim}x{dim}")));
        }
        let st = Self {
            spin_dim,
            n_max,
            rho,
        };
        st.validate()?;
        Ok(st)
    }

    pub(crate) fn from_parts_unchecked(spin_dim: usize, n_max: usize, rho: Array2<C64>) -> Self {
        Self {
            spin_dim,
            n_max,
            rho,
        }
    }

    pub fn product(spin_dim: usize, spin_level: usize, osc: &OscState) -> Result<Self> {
        check_dims(spin_dim, osc.n_max())?;
        if spin_level >= spin_dim {
            return Err(Error::index(format!(
                "spin level {spin_level} outside spin dimension {spin_dim}"
            )));
        }
        let d = osc.dim();
        let mut rho = Array2::zeros((spin_dim * d, spin_dim * d));
        rho.slice_mut(s![
            spin_level * d..(spin_level + 1) * d,
            spin_level * d..(spin_level + 1) * d
        ])
        .assign(&osc.rho());
        Ok(Self {
            spin_dim,
            n_max: osc.n_max(),
            rho,
        })
    }

    pub fn spin_dim(&self) -> usize {
        self.spin_dim
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn osc_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn rho(&self) -> &Array2<C64> {
        &self.rho
    }

    pub(crate) fn rho_mut(&mut self) -> &mut Array2<C64> {
        &mut self.rho
    }

    pub fn into_rho(self) -> Array2<C64> {
        self.rho
    }

    pub fn block(&self, s: usize, t: usize) -> ArrayView2<'_, C64> {
        let d = self.osc_dim();
        self.rho.slice(s![s * d..(s + 1) * d, t * d..(t + 1) * d])
    }

    pub fn block_mut(&mut self, s: usize, t: usize) -> ArrayViewMut2<'_, C64> {
        let d = self.osc_dim();
        self.rho
            .slice_mut(s![s * d..(s + 1) * d, t * d..(t + 1) * d])
    }

    pub fn trace(&self) -> C64 {
        self.rho.diag().sum()
    }

    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ|ρ_ij|² for Hermitian ρ.
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn spin_probs(&self) -> Vec<f64> {
        (0..self.spin_dim)
            .map(|s| self.block(s, s).diag().iter().map(|z| z.re).sum())
            .collect()
    }

    pub fn fock_populations(&self) -> Vec<f64> {
        let mut pops = vec![0.0; self.osc_dim()];
        for s in 0..self.spin_dim {
            for (n, z) in self.block(s, s).diag().iter().enumerate() {
                pops[n] += z.re;
            }
        }
        pops
    }

    pub fn reduced_oscillator(&self) -> OscState {
        let d = self.osc_dim();
        let mut rho = Array2::zeros((d, d));
        for s in 0..self.spin_dim {
            rho += &self.block(s, s);
        }
        OscState::Mixed(rho)
    }

    /// Reduced spin density matrix.
    pub fn reduced_spin(&self) -> Array2<C64> {
        Array2::from_shape_fn((self.spin_dim, self.spin_dim), |(s, t)| {
            self.block(s, t).diag().sum()
        })
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.rho.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.rho[[i, j]] - self.rho[[j, i]].conj()).norm());
            }
        }
        worst
    }

    pub fn validate(&self) -> Result<()> {
        if self
            .rho
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidState(
                "density matrix has non-finite entries".into(),
            ));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix not Hermitian (defect {defect:.2e})"
            )));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigh(&self.rho).0.first().copied().unwrap_or(0.0)
    }

    pub fn validate_positive(&self) -> Result<()> {
        self.validate()?;
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::Cptp {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }

    pub fn check_leakage(&self, policy: TruncationPolicy) -> Result<()> {
        policy.check(self.fock_populations(), self.n_max)
    }

    /// Replaces rounding-level anti-Hermitian parts.
    pub(crate) fn hermitize(&mut self) {
        let h = (&self.rho + &self.rho.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
        self.rho = h;
    }

    pub fn normalize(&mut self) -> f64 {
        let tr = self.trace().re;
        if tr > 0.0 {
            self.rho.mapv_inplace(|z| z / tr);
        }
        tr
    }

    /// `⟨ψ|ρ|ψ⟩` against a pure hybrid target.
    pub fn fidelity_with_ket(&self, target: &HybridKet) -> f64 {
        inner(target.amps(), &self.rho.dot(target.amps())).re
    }
}
