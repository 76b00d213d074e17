//! Displaced-parity Wigner function, used as an independent check on the
//! Fourier reconstruction.

use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_1_PI;

use crate::error::Result;
use crate::fock::action::displace_ket;
use crate::fock::{OscState, TruncationPolicy};

/// `W(x, p) = (1/π) Σ_n (-1)^n |⟨n|D(-α)ψ⟩|²` with `α = (x + ip)/√2`.
pub fn wigner_parity_oracle(state: &OscState, alpha: C64) -> Result<f64> {
    state.check_leakage(TruncationPolicy::default())?;
    let mut total = 0.0;
    for (w, psi) in state.components() {
        let moved = displace_ket(psi.view(), -alpha)?;
        let parity: f64 = moved
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if n % 2 == 0 {
                    c.norm_sqr()
                } else {
                    -c.norm_sqr()
                }
            })
            .sum();
        total += w * parity;
    }
    Ok(FRAC_1_PI * total)
}

/// [`wigner_parity_oracle`] at quadrature coordinates.
pub fn wigner_parity_oracle_xp(state: &OscState, x: f64, p: f64) -> Result<f64> {
    wigner_parity_oracle(state, C64::new(x, p) / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::fock_ket;

    #[test]
    fn reference_values() {
        assert!(
            (wigner_parity_oracle(&OscState::vacuum(10), C64::new(0.0, 0.0)).unwrap() - FRAC_1_PI)
                .abs()
                < 1e-15
        );
        assert!(
            (wigner_parity_oracle(&OscState::fock(1, 10), C64::new(0.0, 0.0)).unwrap() + FRAC_1_PI)
                .abs()
                < 1e-15
        );
        let a0 = C64::new(1.2, -0.7);
        let coh = crate::fock::action::displace_ket_in(fock_ket(0, 1).view(), a0, 80).unwrap();
        let st = OscState::from_ket(coh).unwrap();
        assert!((wigner_parity_oracle(&st, a0).unwrap() - FRAC_1_PI).abs() < 1e-9);
        let x = 0.8;
        let v = wigner_parity_oracle_xp(&OscState::vacuum(10), x, 0.0).unwrap();
        assert!((v - FRAC_1_PI * (-x * x).exp()).abs() < 1e-12);
    }
}
