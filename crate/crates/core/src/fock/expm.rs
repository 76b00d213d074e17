use ndarray::Array2;
use num_complex::Complex64 as C64;

fn norm_1(a: &Array2<C64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Dense matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn expm_scaling_squaring(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let norm = norm_1(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings);
    let b = a.mapv(|z| z * scale);

    let mut result: Array2<C64> = Array2::eye(n).mapv(|x: f64| C64::new(x, 0.0));
    let mut term = result.clone();
    for k in 1..=40 {
        term = term.dot(&b).mapv(|z| z / k as f64);
        result += &term;
        if norm_1(&term) < 1e-18 * norm_1(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_of_diagonal() {
        let mut a = Array2::zeros((3, 3));
        a[[0, 0]] = C64::new(0.0, 2.0);
        a[[1, 1]] = C64::new(-1.5, 0.0);
        a[[2, 2]] = C64::new(3.0, -1.0);
        let e = expm_scaling_squaring(&a);
        for i in 0..3 {
            assert!((e[[i, i]] - a[[i, i]].exp()).norm() < 1e-12 * a[[i, i]].exp().norm());
        }
        assert!(e[[0, 1]].norm() < 1e-15);
    }

    #[test]
    fn rotation_generator() {
        // exp([[0, -t], [t, 0]]) is a rotation by t.
        let t = 7.3;
        let mut a = Array2::zeros((2, 2));
        a[[0, 1]] = C64::new(-t, 0.0);
        a[[1, 0]] = C64::new(t, 0.0);
        let e = expm_scaling_squaring(&a);
        assert!((e[[0, 0]].re - t.cos()).abs() < 1e-12);
        assert!((e[[1, 0]].re - t.sin()).abs() < 1e-12);
    }
}
