//! Action of `D(α)` on a ket without forming the matrix, on a padded space.

use ndarray::{Array1, ArrayView1};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Highest level carrying more than `1e-30` population.
pub fn top_level(psi: ArrayView1<C64>) -> usize {
    psi.iter().rposition(|c| c.norm_sqr() > 1e-30).unwrap_or(0)
}

/// Dimension large enough to hold `D(α)ψ` for a ket supported below `n_top`.
pub fn padded_dim(n_top: usize, alpha_abs: f64) -> usize {
    let r = (n_top as f64).sqrt() + alpha_abs + 9.0;
    (r * r).ceil() as usize + 20
}

fn apply_generator(alpha: C64, v: &Array1<C64>, out: &mut Array1<C64>) {
    let d = v.len();
    let ac = alpha.conj();
    for n in 0..d {
        let mut acc = C64::new(0.0, 0.0);
        if n > 0 {
            acc += alpha * (n as f64).sqrt() * v[n - 1];
        }
        if n + 1 < d {
            acc -= ac * ((n + 1) as f64).sqrt() * v[n + 1];
        }
        out[n] = acc;
    }
}

/// `D(α)ψ` on a space of dimension `dim ≥ len(ψ)` via a scaled Taylor series.
pub fn displace_ket_in(psi: ArrayView1<C64>, alpha: C64, dim: usize) -> Result<Array1<C64>> {
    if dim < psi.len() {
        return Err(Error::domain("padded dimension smaller than the ket"));
    }
    let mut v = Array1::zeros(dim);
    v.slice_mut(ndarray::s![..psi.len()]).assign(&psi);
    if alpha == C64::new(0.0, 0.0) {
        return Ok(v);
    }
    let steps = (2.0 * alpha.norm() * (dim as f64).sqrt()).ceil().max(1.0) as usize;
    let a = alpha / steps as f64;
    let scale = v
        .iter()
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(1e-300);
    let mut term = Array1::zeros(dim);
    let mut next = Array1::zeros(dim);
    for _ in 0..steps {
        term.assign(&v);
        for k in 1..200 {
            apply_generator(a, &term, &mut next);
            next.mapv_inplace(|z| z / k as f64);
            std::mem::swap(&mut term, &mut next);
            v += &term;
            let size = term.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if size < 1e-18 * scale {
                break;
            }
        }
    }
    Ok(v)
}

/// `D(α)ψ` on an automatically padded space; the result may be longer than `ψ`.
pub fn displace_ket(psi: ArrayView1<C64>, alpha: C64) -> Result<Array1<C64>> {
    let dim = padded_dim(top_level(psi), alpha.norm()).max(psi.len());
    displace_ket_in(psi, alpha, dim)
}
