//! Generalized squeezing `G_k(ζ) = exp(-i(ζ* a^k + ζ a†^k)/2)` and displacements.
//!
//! With `ζ = r e^{iφ}` the generator is `r R (a^k + a†^k)/2 R†` where
//! `R = exp(iφ n̂/k)`, so one real-symmetric eigendecomposition per
//! `(k, n_max)` serves every `ζ`. The matrix `a^k + a†^k` only couples levels
//! `n ↔ n ± k`, so it splits into `k` tridiagonal blocks (one per residue
//! class of `n mod k`) which are diagonalized independently.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView1, Zip};
use num_complex::Complex64 as C64;

use super::expm::expm_scaling_squaring;
use super::operator::{fock_ket, make_annihilation, Operator};
use super::truncation::TruncationPolicy;
use crate::error::{Error, Result};

#[derive(Debug)]
struct ResidueBlock {
    levels: Vec<usize>,
    eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, rows are indexed like `levels`.
    vectors: Array2<f64>,
}

/// Spectral decomposition of `(a^k + a†^k)/2` on Fock levels `0..=n_max`.
#[derive(Debug)]
pub struct SqueezeBasis {
    k: usize,
    n_max: usize,
    blocks: Vec<ResidueBlock>,
}

fn ladder_weight(n: usize, k: usize) -> f64 {
    // ⟨n|a^k|n+k⟩ = sqrt((n+1)(n+2)…(n+k))
    (1..=k).map(|j| (n + j) as f64).product::<f64>().sqrt()
}

impl SqueezeBasis {
    pub fn new(k: usize, n_max: usize) -> Result<Self> {
        if !(1..=4).contains(&k) {
            return Err(Error::domain(format!(
                "interaction order k={k} outside 1..=4"
            )));
        }
        if n_max < 1 {
            return Err(Error::domain("n_max must be at least 1"));
        }
        let blocks = (0..k.min(n_max + 1))
            .map(|residue| {
                let levels: Vec<usize> = (residue..=n_max).step_by(k).collect();
                let m = levels.len();
                let mut t = DMatrix::<f64>::zeros(m, m);
                for j in 0..m.saturating_sub(1) {
                    let w = 0.5 * ladder_weight(levels[j], k);
                    t[(j, j + 1)] = w;
                    t[(j + 1, j)] = w;
                }
                let eig = SymmetricEigen::new(t);
                let vectors = Array2::from_shape_fn((m, m), |(i, j)| eig.eigenvectors[(i, j)]);
                ResidueBlock {
                    levels,
                    eigenvalues: eig.eigenvalues.iter().copied().collect(),
                    vectors,
                }
            })
            .collect();
        Ok(Self { k, n_max, blocks })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    fn frame_angle(&self, zeta: C64) -> f64 {
        zeta.arg() / self.k as f64
    }

    /// Dense `G_k(ζ)`.
    pub fn unitary(&self, zeta: C64) -> Operator {
        let d = self.dim();
        let r = zeta.norm();
        let theta = self.frame_angle(zeta);
        let mut u = Array2::<C64>::zeros((d, d));
        for b in &self.blocks {
            let cos_v = scale_columns(&b.vectors, b.eigenvalues.iter().map(|l| (r * l).cos()));
            let sin_v = scale_columns(&b.vectors, b.eigenvalues.iter().map(|l| -(r * l).sin()));
            let vt = b.vectors.t();
            let re = cos_v.dot(&vt);
            let im = sin_v.dot(&vt);
            for (i, &ni) in b.levels.iter().enumerate() {
                for (j, &nj) in b.levels.iter().enumerate() {
                    let phase = C64::from_polar(1.0, theta * (ni as f64 - nj as f64));
                    u[[ni, nj]] = phase * C64::new(re[[i, j]], im[[i, j]]);
                }
            }
        }
        Operator::from_matrix_unchecked(u)
    }

    /// `G_k(ζ) v` without forming the dense matrix.
    pub fn apply(&self, zeta: C64, v: ArrayView1<C64>) -> Array1<C64> {
        assert_eq!(v.len(), self.dim(), "vector dimension mismatch");
        let r = zeta.norm();
        let theta = self.frame_angle(zeta);
        let mut out = Array1::<C64>::zeros(self.dim());
        for b in &self.blocks {
            let w: Vec<C64> = b
                .levels
                .iter()
                .map(|&n| v[n] * C64::from_polar(1.0, -theta * n as f64))
                .collect();
            let m = b.levels.len();
            let mut y = vec![C64::new(0.0, 0.0); m];
            for (j, yj) in y.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (i, wi) in w.iter().enumerate() {
                    acc += wi * b.vectors[[i, j]];
                }
                *yj = acc * C64::from_polar(1.0, -r * b.eigenvalues[j]);
            }
            for (i, &n) in b.levels.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (j, yj) in y.iter().enumerate() {
                    acc += *yj * b.vectors[[i, j]];
                }
                out[n] = acc * C64::from_polar(1.0, theta * n as f64);
            }
        }
        out
    }
}

/// Band coefficients of `A = -i(ζ* a^k + ζ a†^k)/2`: `(A X)_n = up_n X_{n+k} + down_n X_{n-k}`.
fn generator_bands(k: usize, zeta: C64, d: usize) -> (Vec<C64>, Vec<C64>) {
    let c = C64::new(0.0, -0.5);
    let up = (0..d)
        .map(|n| {
            if n + k < d {
                c * zeta.conj() * ladder_weight(n, k)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    let down = (0..d)
        .map(|n| {
            if n >= k {
                c * zeta * ladder_weight(n - k, k)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    (up, down)
}

/// `G_k(ζ_l) X G_k(ζ_r)†` by a scaled Taylor series of `X ↦ A_l X + X A_r†`
/// with banded generators; `None` leaves that side untouched.
pub fn squeeze_sandwich_sparse(
    k: usize,
    left: Option<C64>,
    right: Option<C64>,
    x: &Array2<C64>,
) -> Array2<C64> {
    let (rows, cols) = x.dim();
    let zero = C64::new(0.0, 0.0);
    let left = left.filter(|z| *z != zero && rows > k);
    let right = right.filter(|z| *z != zero && cols > k);
    if left.is_none() && right.is_none() {
        return x.clone();
    }
    let (lu, ld) = left.map_or((vec![zero; rows], vec![zero; rows]), |z| {
        generator_bands(k, z, rows)
    });
    // (X A_r†)_{i,n} = conj(down_n) X_{i,n-k} + conj(up_n) X_{i,n+k}
    let (ru, rd) = right.map_or((vec![zero; cols], vec![zero; cols]), |z| {
        let (u, d) = generator_bands(k, z, cols);
        (
            u.iter().map(|c| c.conj()).collect(),
            d.iter().map(|c| c.conj()).collect(),
        )
    });
    let bound = left.map_or(0.0, |z| z.norm() * ladder_weight(rows - 1 - k, k))
        + right.map_or(0.0, |z| z.norm() * ladder_weight(cols - 1 - k, k));
    let steps = bound.ceil().max(1.0) as usize;
    let inv_steps = 1.0 / steps as f64;
    let scale = x
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(1e-300);
    let mut v = x.as_standard_layout().into_owned();
    let mut term = v.clone();
    let mut next = Array2::<C64>::zeros(x.dim());
    for _ in 0..steps {
        term.assign(&v);
        for j in 1..200 {
            let f = inv_steps / j as f64;
            let src = term.as_slice().expect("standard layout");
            Zip::indexed(next.rows_mut()).par_for_each(|i, mut row| {
                let row = row.as_slice_mut().expect("contiguous row");
                let cur = &src[i * cols..(i + 1) * cols];
                for n in 0..cols {
                    let mut acc = zero;
                    if n >= k {
                        acc += rd[n] * cur[n - k];
                    }
                    if n + k < cols {
                        acc += ru[n] * cur[n + k];
                    }
                    row[n] = acc * f;
                }
                if i + k < rows && lu[i] != zero {
                    let c = lu[i] * f;
                    for (o, s) in row.iter_mut().zip(&src[(i + k) * cols..(i + k + 1) * cols]) {
                        *o += c * s;
                    }
                }
                if i >= k && ld[i] != zero {
                    let c = ld[i] * f;
                    for (o, s) in row.iter_mut().zip(&src[(i - k) * cols..(i - k + 1) * cols]) {
                        *o += c * s;
                    }
                }
            });
            std::mem::swap(&mut term, &mut next);
            v += &term;
            if term.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() < 1e-17 * scale {
                break;
            }
        }
    }
    v
}

/// `G_k(ζ) X`; see [`squeeze_sandwich_sparse`].
pub fn squeeze_left_sparse(k: usize, zeta: C64, x: &Array2<C64>) -> Array2<C64> {
    squeeze_sandwich_sparse(k, Some(zeta), None, x)
}

fn scale_columns(v: &Array2<f64>, scales: impl Iterator<Item = f64>) -> Array2<f64> {
    let mut out = v.clone();
    for (mut col, s) in out.columns_mut().into_iter().zip(scales) {
        col.mapv_inplace(|x| x * s);
    }
    out
}

fn ket_populations(v: &Array1<C64>) -> impl Iterator<Item = f64> + '_ {
    v.iter().map(|z| z.norm_sqr())
}

/// Dense `G_k(ζ)`, guarded against truncation leakage of the vacuum image.
///
/// The σ-conditioned interaction applies `G_k(s·ζ)` on the branch where the
/// conditioning Pauli has eigenvalue `s`. With `σ_z|0_s⟩ = -|0_s⟩` the state
/// produced on the `|0_s⟩` branch is `G_k(-ζ)|0⟩`; see [`constituent_state`].
pub fn make_generalized_squeeze(k: usize, zeta: C64, n_max: usize) -> Result<Operator> {
    make_generalized_squeeze_with(k, zeta, n_max, TruncationPolicy::default())
}

pub fn make_generalized_squeeze_with(
    k: usize,
    zeta: C64,
    n_max: usize,
    policy: TruncationPolicy,
) -> Result<Operator> {
    let basis = SqueezeBasis::new(k, n_max)?;
    let vac_image = basis.apply(zeta, fock_ket(0, n_max + 1).view());
    policy.check(ket_populations(&vac_image), n_max)?;
    Ok(basis.unitary(zeta))
}

/// Oscillator state `|ζ_k⟩ := G_k(-ζ)|0⟩`, the `|0_s⟩`-branch image of the
/// vacuum under `exp(-i σ_z ⊗ (ζ* a^k + ζ a†^k)/2)`.
pub fn constituent_state(
    k: usize,
    zeta: C64,
    n_max: usize,
    policy: TruncationPolicy,
) -> Result<Array1<C64>> {
    let basis = SqueezeBasis::new(k, n_max)?;
    constituent_state_in(&basis, zeta, policy)
}

pub fn constituent_state_in(
    basis: &SqueezeBasis,
    zeta: C64,
    policy: TruncationPolicy,
) -> Result<Array1<C64>> {
    let v = basis.apply(-zeta, fock_ket(0, basis.dim()).view());
    policy.check(ket_populations(&v), basis.n_max())?;
    Ok(v)
}

/// Displacement `D(α) = exp(α a† - α* a)` by scaling and squaring of the
/// truncated generator.
pub fn make_displacement(alpha: C64, n_max: usize) -> Result<Operator> {
    make_displacement_with(alpha, n_max, TruncationPolicy::default())
}

pub fn make_displacement_with(
    alpha: C64,
    n_max: usize,
    policy: TruncationPolicy,
) -> Result<Operator> {
    let a = make_annihilation(n_max)?;
    let gen = a.dagger().matrix().mapv(|z| z * alpha) - a.matrix().mapv(|z| z * alpha.conj());
    let d = Operator::from_matrix_unchecked(expm_scaling_squaring(&gen));
    let image = d.matrix().column(0).to_owned();
    policy.check(ket_populations(&image), n_max)?;
    Ok(d)
}

/// `D(α) = G_1(2iα)`, computed through the Hermitian eigendecomposition.
pub fn displacement_via_eigen(alpha: C64, n_max: usize) -> Result<Operator> {
    Ok(SqueezeBasis::new(1, n_max)?.unitary(C64::new(0.0, 2.0) * alpha))
}

/// Closed-form Fock amplitudes of a squeezed vacuum,
/// `c_{2n} = (-e^{i arg ζ} tanh|ζ|)^n √((2n)!)/(2^n n!) / √cosh|ζ|`, for levels `0..=n_cut`.
///
/// This expansion uses the `S(ζ) = exp((ζ* a² - ζ a†²)/2)` phase convention.
/// It relates to [`SqueezeBasis`] by `G_2(ζ)|0⟩ = S(iζ)|0⟩`, i.e.
/// `⟨2n|G_2(ζ)|0⟩ = i^n c_{2n}`; see [`squeeze_convention_phase`].
pub fn squeezed_vacuum_fock_amplitudes(zeta: C64, n_cut: usize) -> Result<Array1<C64>> {
    if n_cut < 2 {
        return Err(Error::domain("n_cut must be at least 2"));
    }
    let r = zeta.norm();
    let ratio = -C64::from_polar(r.tanh(), zeta.arg());
    let mut out = Array1::zeros(n_cut + 1);
    let mut c = C64::new(1.0 / r.cosh().sqrt(), 0.0);
    let mut n = 0usize;
    while 2 * n <= n_cut {
        out[2 * n] = c;
        // c_{2n+2}/c_{2n} = ratio · √((2n+1)(2n+2)) / (2(n+1))
        let f = (((2 * n + 1) * (2 * n + 2)) as f64).sqrt() / (2.0 * (n + 1) as f64);
        c *= ratio * f;
        n += 1;
    }
    Ok(out)
}

/// Phase `i^n` relating the closed-form expansion to `G_2(ζ)|0⟩` on level `2n`.
pub fn squeeze_convention_phase(level: usize) -> C64 {
    debug_assert!(level.is_multiple_of(2));
    C64::new(0.0, 1.0).powu((level / 2) as u32)
}
