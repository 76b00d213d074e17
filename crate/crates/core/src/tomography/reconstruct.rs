//! Wigner function from a characteristic-function grid.
//!
//! `W(x, p) = (1/2π²) ∬ χ(β) e^{i√2(p β_r - x β_i)} dβ_r dβ_i`, evaluated as a
//! separable trapezoid sum.

use std::f64::consts::{PI, SQRT_2};

use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::grid::{Axis, CharGrid, WignerGrid};
use crate::error::{Error, Result};

/// Output axis chosen from the input grid: `x_max = √2 β_max` at the same point count.
pub fn dual_axis(beta: &Axis) -> Axis {
    Axis {
        extent: SQRT_2 * beta.extent,
        points: beta.points,
    }
}

/// Largest unaliased `x_max` for a β spacing.
pub fn alias_limit(beta: &Axis) -> f64 {
    PI / (SQRT_2 * beta.step())
}

pub fn reconstruct_wigner(chi: &CharGrid) -> Result<WignerGrid> {
    reconstruct_wigner_on(chi, dual_axis(&chi.axis))
}

/// Reconstruction onto a caller-chosen `(x, p)` axis.
pub fn reconstruct_wigner_on(chi: &CharGrid, out: Axis) -> Result<WignerGrid> {
    Ok(reconstruct_complex(chi, out)?.0)
}

/// Reconstruction plus the largest imaginary residue.
pub fn reconstruct_complex(chi: &CharGrid, out: Axis) -> Result<(WignerGrid, f64)> {
    let limit = alias_limit(&chi.axis);
    if out.extent >= limit {
        return Err(Error::Alias(format!(
            "output extent {} reaches the aliasing limit {limit:.3} of the beta spacing",
            out.extent
        )));
    }
    let b = &chi.axis;
    let wts = b.weights();
    let bc = b.coords();
    let xs = out.coords();
    let n = b.points;
    let m = out.points;
    // E_x[a, l] = w_l e^{-i√2 x_a β_l},  E_p[c, j] = w_j e^{i√2 p_c β_j}
    let ex = Array2::from_shape_fn((m, n), |(a, l)| {
        C64::from_polar(wts[l], -SQRT_2 * xs[a] * bc[l])
    });
    let ep = Array2::from_shape_fn((m, n), |(c, j)| {
        C64::from_polar(wts[j], SQRT_2 * xs[c] * bc[j])
    });
    // χ is indexed [β_r, β_i]; W[a, c] = Σ_l E_x[a,l] Σ_j χ[j,l] E_p[c,j]
    let t = ep.dot(&chi.values); // [c, l]
    let full = ex.dot(&t.t()); // [a, c]
    let norm = 1.0 / (2.0 * PI * PI);
    let mut imag: f64 = 0.0;
    let values = Array2::from_shape_fn((m, m), |(a, c)| {
        let z = full[[a, c]] * norm;
        imag = imag.max(z.im.abs());
        z.re
    });
    Ok((WignerGrid::new(out, values)?, imag))
}
