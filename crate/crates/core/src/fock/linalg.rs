use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn eigh(m: &Array2<C64>) -> (Vec<f64>, Array2<C64>) {
    let n = m.nrows();
    // Symmetrize to keep rounding noise out of the solver.
    let dm = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[[i, j]] + m[[j, i]].conj()));
    let eig = SymmetricEigen::new(dm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Array2::from_shape_fn((n, n), |(i, j)| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Weighted pure components `ρ = Σ w_k |v_k⟩⟨v_k|`, dropping weights below `cutoff`.
pub fn spectral_components(m: &Array2<C64>, cutoff: f64) -> Vec<(f64, Array1<C64>)> {
    let (values, vectors) = eigh(m);
    values
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &w)| w > cutoff)
        .map(|(k, &w)| (w, vectors.column(k).to_owned()))
        .collect()
}

pub fn inner(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn outer(a: &Array1<C64>, b: &Array1<C64>) -> Array2<C64> {
    Array2::from_shape_fn((a.len(), b.len()), |(i, j)| a[i] * b[j].conj())
}

/// `A B A†` for square matrices.
pub fn sandwich(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    a.dot(b).dot(&a.t().mapv(|z| z.conj()))
}
