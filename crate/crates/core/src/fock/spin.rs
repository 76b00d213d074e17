//! Spin operators on a two- or three-level system.
//!
//! Level convention: `σ_z = |1_s⟩⟨1_s| - |0_s⟩⟨0_s|`, so in the ordered
//! basis `(|0_s⟩, |1_s⟩)` the matrix is `diag(-1, +1)`. `σ_x` and `σ_y` keep
//! their textbook matrices, which makes `R_y(π/2)|0_s⟩ = (|0_s⟩ + |1_s⟩)/√2`.

use std::fmt;
use std::str::FromStr;

use ndarray::{array, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::operator::Operator;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Array2<C64> {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::X => array![[o, l], [l, o]],
            Pauli::Y => array![[o, -i], [i, o]],
            Pauli::Z => array![[-l, o], [o, l]],
        }
    }

    /// Eigenvectors in the `(|0_s⟩, |1_s⟩)` basis, ordered `(-1, +1)`.
    pub fn eigenbasis(self) -> [[C64; 2]; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = |x: f64| C64::new(x, 0.0);
        match self {
            Pauli::X => [[r(h), r(-h)], [r(h), r(h)]],
            Pauli::Y => [[r(h), C64::new(0.0, -h)], [r(h), C64::new(0.0, h)]],
            Pauli::Z => [[r(1.0), r(0.0)], [r(0.0), r(1.0)]],
        }
    }

    /// Normalized commutator axis: `[σ_a, σ_b] = 2i·sign·σ_c` in the textbook
    /// convention; returns `c` or `None` when the axes commute.
    pub fn commutator_axis(self, other: Pauli) -> Option<Pauli> {
        use Pauli::*;
        match (self, other) {
            (X, Y) | (Y, X) => Some(Z),
            (Y, Z) | (Z, Y) => Some(X),
            (Z, X) | (X, Z) => Some(Y),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pauli::X => "x",
            Pauli::Y => "y",
            Pauli::Z => "z",
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Pauli::X),
            "y" | "Y" => Ok(Pauli::Y),
            "z" | "Z" => Ok(Pauli::Z),
            other => Err(Error::domain(format!("unknown Pauli axis '{other}'"))),
        }
    }
}

/// Equatorial generator `σ_γ = cos γ σ_x + sin γ σ_y`.
pub fn sigma_gamma(gamma: f64) -> Array2<C64> {
    let o = C64::new(0.0, 0.0);
    array![
        [o, C64::from_polar(1.0, -gamma)],
        [C64::from_polar(1.0, gamma), o]
    ]
}

/// `exp(-iθσ_γ/2)` on a two-level pair.
pub fn rotation_2x2(gamma: f64, theta: f64) -> Array2<C64> {
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = C64::new(0.0, -(theta / 2.0).sin());
    let sg = sigma_gamma(gamma);
    let mut r = sg.mapv(|z| z * s);
    r[[0, 0]] += c;
    r[[1, 1]] += c;
    r
}

pub(crate) fn check_pair(pair: (usize, usize), spin_dim: usize) -> Result<()> {
    let (i, j) = pair;
    if !(2..=3).contains(&spin_dim) {
        return Err(Error::index(format!(
            "spin dimension {spin_dim} not in {{2, 3}}"
        )));
    }
    if i == j || i >= spin_dim || j >= spin_dim {
        return Err(Error::index(format!(
            "invalid level pair ({i},{j}) for spin dimension {spin_dim}"
        )));
    }
    Ok(())
}

/// Embeds a 2×2 operator on levels `(i, j)`; remaining levels get the identity.
pub fn embed_spin_op(
    sigma: &Array2<C64>,
    pair: (usize, usize),
    spin_dim: usize,
) -> Result<Operator> {
    check_pair(pair, spin_dim)?;
    if sigma.dim() != (2, 2) {
        return Err(Error::domain("spin operator must be 2x2"));
    }
    let (i, j) = pair;
    let mut m = Operator::identity(spin_dim).into_matrix();
    let lv = [i, j];
    for (a, &la) in lv.iter().enumerate() {
        for (b, &lb) in lv.iter().enumerate() {
            m[[la, lb]] = sigma[[a, b]];
        }
    }
    Operator::from_matrix(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Array2<C64>, b: &Array2<C64>, tol: f64) -> bool {
        a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn sigma_z_sign_convention() {
        let z = embed_spin_op(&Pauli::Z.matrix(), (0, 1), 2).unwrap();
        assert_eq!(z.matrix()[[0, 0]], C64::new(-1.0, 0.0));
        assert_eq!(z.matrix()[[1, 1]], C64::new(1.0, 0.0));
    }

    #[test]
    fn qutrit_embedding_keeps_spectator_level() {
        let x = embed_spin_op(&Pauli::X.matrix(), (0, 1), 3).unwrap();
        for k in 0..3 {
            let e = if k == 2 { 1.0 } else { 0.0 };
            assert_eq!(x.matrix()[[2, k]], C64::new(e, 0.0));
            assert_eq!(x.matrix()[[k, 2]], C64::new(e, 0.0));
        }
    }

    #[test]
    fn paulis_square_to_identity() {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let e = embed_spin_op(&p.matrix(), (0, 2), 3).unwrap();
            let sq = e.dot(&e);
            assert!(close(sq.matrix(), Operator::identity(3).matrix(), 1e-15));
        }
    }

    #[test]
    fn eigenbasis_is_consistent() {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let m = p.matrix();
            for (idx, ev) in p.eigenbasis().iter().enumerate() {
                let lambda = if idx == 0 { -1.0 } else { 1.0 };
                for r in 0..2 {
                    let lhs = m[[r, 0]] * ev[0] + m[[r, 1]] * ev[1];
                    assert!((lhs - ev[r] * lambda).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn ry_half_pi_on_ground() {
        let r = rotation_2x2(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r[[0, 0]] - C64::new(h, 0.0)).norm() < 1e-15);
        assert!((r[[1, 0]] - C64::new(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn invalid_pairs() {
        assert!(embed_spin_op(&Pauli::X.matrix(), (0, 0), 2).is_err());
        assert!(embed_spin_op(&Pauli::X.matrix(), (0, 2), 2).is_err());
        assert!(embed_spin_op(&Pauli::X.matrix(), (0, 1), 4).is_err());
    }
}
