use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense square operator on a truncated Fock space (or spin ⊗ Fock space).
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: Array2<C64>,
}

impl Operator {
    pub fn from_matrix(mat: Array2<C64>) -> Result<Self> {
        let (r, c) = mat.dim();
        if r != c || r == 0 {
            return Err(Error::domain(format!(
                "operator must be square and non-empty, got {r}x{c}"
            )));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("operator has non-finite entries"));
        }
        Ok(Self { mat })
    }

    pub(crate) fn from_matrix_unchecked(mat: Array2<C64>) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        Self { mat }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: Array2::eye(dim).mapv(|x: f64| C64::new(x, 0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.mat
    }

    pub fn dagger(&self) -> Self {
        Self {
            mat: self.mat.t().mapv(|z| z.conj()),
        }
    }

    pub fn dot(&self, other: &Operator) -> Operator {
        Self {
            mat: self.mat.dot(&other.mat),
        }
    }

    pub fn apply(&self, v: ArrayView1<C64>) -> Array1<C64> {
        self.mat.dot(&v)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.mat[[i, j]] - self.mat[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// `max|M - M†| < 1e-12 ‖M‖`.
    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= 1e-12 * self.norm().max(f64::MIN_POSITIVE)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Operator) -> Operator {
        Operator {
            mat: kron(&self.mat, &other.mat),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.diag().sum()
    }
}

pub(crate) fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            let mut blk = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
            blk.zip_mut_with(b, |o, &bv| *o = aij * bv);
        }
    }
    out
}

/// Truncated annihilation operator on levels `0..=n_max`.
pub fn make_annihilation(n_max: usize) -> Result<Operator> {
    if n_max < 1 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    let d = n_max + 1;
    let mut mat = Array2::zeros((d, d));
    for n in 1..d {
        mat[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(Operator { mat })
}

pub fn make_creation(n_max: usize) -> Result<Operator> {
    Ok(make_annihilation(n_max)?.dagger())
}

pub fn make_number(n_max: usize) -> Operator {
    let d = n_max + 1;
    let mut mat = Array2::zeros((d, d));
    for n in 0..d {
        mat[[n, n]] = C64::new(n as f64, 0.0);
    }
    Operator { mat }
}

/// Position quadrature `x = (a + a†)/√2`.
pub fn make_position(n_max: usize) -> Result<Operator> {
    let a = make_annihilation(n_max)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(Operator {
        mat: (a.matrix() + &a.dagger().mat).mapv(|z| z * s),
    })
}

/// Momentum quadrature `p = (a - a†)/(i√2)`.
pub fn make_momentum(n_max: usize) -> Result<Operator> {
    let a = make_annihilation(n_max)?;
    let f = C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2);
    Ok(Operator {
        mat: (a.matrix() - &a.dagger().mat).mapv(|z| z * f),
    })
}

/// Fock-space parity `(-1)^n`.
pub fn make_parity(n_max: usize) -> Operator {
    let d = n_max + 1;
    let mut mat = Array2::zeros((d, d));
    for n in 0..d {
        mat[[n, n]] = C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    Operator { mat }
}

/// Fock basis vector `|n⟩` in a space of dimension `dim`.
pub fn fock_ket(n: usize, dim: usize) -> Array1<C64> {
    let mut v = Array1::zeros(dim);
    v[n] = C64::new(1.0, 0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn annihilation_entries() {
        let a = make_annihilation(1).unwrap();
        assert_eq!(a.matrix()[[0, 1]], C64::new(1.0, 0.0));
        let a = make_annihilation(6).unwrap();
        assert_abs_diff_eq!(a.matrix()[[3, 4]].re, 2.0, epsilon = 1e-15);
        let vac = a.apply(fock_ket(0, 7).view());
        assert!(vac.iter().all(|z| z.norm() == 0.0));
        assert!(make_annihilation(0).is_err());
    }

    #[test]
    fn canonical_commutator_on_interior() {
        let n_max = 20;
        let x = make_position(n_max).unwrap();
        let p = make_momentum(n_max).unwrap();
        let comm = x.dot(&p).matrix() - p.dot(&x).matrix();
        for i in 0..n_max {
            for j in 0..n_max {
                let expect = if i == j {
                    C64::new(0.0, 1.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                assert!((comm[[i, j]] - expect).norm() < 1e-12);
            }
        }
        assert!(x.is_hermitian() && p.is_hermitian());
    }

    #[test]
    fn kron_dimensions() {
        let a = Operator::identity(2);
        let b = make_number(3);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 8);
        assert_eq!(k.matrix()[[7, 7]], C64::new(3.0, 0.0));
    }
}
