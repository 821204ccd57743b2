//! Thin wrappers over dense complex linear algebra with fixed conventions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Singular value decomposition `a = u * diag(s) * vh` with descending `s`.
///
/// `u` is `m x r`, `vh` is `r x n`, `r = min(m, n)`.
pub fn svd(a: &DMatrix<Complex64>) -> (DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>) {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("svd requested u");
    let vh = svd.v_t.expect("svd requested v_t");
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    (u, s, vh)
}

/// Largest singular value of `a`.
pub fn sigma_max(a: &DMatrix<Complex64>) -> f64 {
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Sum of singular values of `a` (trace norm of the rectangular matrix).
pub fn nuclear_norm(a: &DMatrix<Complex64>) -> f64 {
    a.clone().svd(false, false).singular_values.iter().sum()
}

/// Eigendecomposition of a Hermitian matrix: `(eigenvalues, eigenvectors)`
/// with real eigenvalues sorted descending and eigenvectors as columns.
pub fn eigh(a: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let se = nalgebra::SymmetricEigen::new(a.clone());
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].partial_cmp(&se.eigenvalues[i]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &se.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Inner product linear in the first argument: `sum_i x_i * conj(y_i)`.
pub fn inner(x: &DVector<Complex64>, y: &DVector<Complex64>) -> Complex64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..x.len() {
        acc += x[i] * y[i].conj();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_svd_recomposes() {
        let a = DMatrix::from_row_slice(
            2,
            3,
            &[
                Complex64::new(1.0, 0.5),
                Complex64::new(0.0, -1.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(-0.5, 0.25),
                Complex64::new(1.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let (u, s, vh) = svd(&a);
        let mut sigma = DMatrix::zeros(s.len(), s.len());
        for (i, &si) in s.iter().enumerate() {
            sigma[(i, i)] = Complex64::new(si, 0.0);
        }
        let recomposed = &u * sigma * &vh;
        let err = (&a - recomposed).norm();
        assert!(err < 1e-12, "recomposition error {err}");
        // u has orthonormal columns
        let gram = u.adjoint() * &u;
        let eye = DMatrix::<Complex64>::identity(gram.nrows(), gram.ncols());
        assert!((gram - eye).norm() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_recomposes() {
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(3.0, 0.0),
            ],
        );
        let (vals, vecs) = eigh(&a);
        assert!(vals[0] >= vals[1]);
        let mut d = DMatrix::zeros(2, 2);
        for i in 0..2 {
            d[(i, i)] = Complex64::new(vals[i], 0.0);
        }
        let recomposed = &vecs * d * vecs.adjoint();
        assert!((&a - recomposed).norm() < 1e-12);
    }
}
