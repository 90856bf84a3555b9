//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::transform::fwht;

pub type Matrix = DMatrix<f64>;

/// Largest eigenvalue of a symmetric matrix, with its unit eigenvector.
pub fn top_eigen(a: &Matrix) -> (f64, DVector<f64>) {
    assert!(a.is_square());
    if a.nrows() == 0 {
        return (0.0, DVector::zeros(0));
    }
    let eig = SymmetricEigen::new(a.clone());
    let (k, &val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    (val, eig.eigenvectors.column(k).into_owned())
}

/// Spectral norm (largest singular value).
///
/// Small matrices go through a full SVD; larger ones through power
/// iteration on `AᵀA`.
pub fn spectral_norm(a: &Matrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    if a.nrows().max(a.ncols()) <= 128 {
        return a.singular_values().max();
    }
    let ata = a.transpose() * a;
    let mut v = DVector::from_fn(a.ncols(), |i, _| 1.0 + 1e-3 * ((i * 7919) % 101) as f64);
    v /= v.norm();
    let mut sigma2 = 0.0;
    for _ in 0..100_000 {
        let w = &ata * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = w / norm;
        let done = (norm - sigma2).abs() <= 1e-13 * norm.max(1.0) && (&next - &v).norm() < 1e-10;
        sigma2 = norm;
        v = next;
        if done {
            break;
        }
    }
    sigma2.sqrt()
}

/// Applies `H·A·H` with `H` the normalized `2ⁿ×2ⁿ` Hadamard matrix.
pub fn hadamard_conjugate(a: &Matrix) -> Matrix {
    let len = a.nrows();
    assert!(a.is_square() && len.is_power_of_two());
    let mut out = a.clone();
    let mut buf = vec![0.0; len];
    for j in 0..len {
        buf.copy_from_slice(out.column(j).as_slice());
        fwht(&mut buf);
        out.column_mut(j).copy_from_slice(&buf);
    }
    for i in 0..len {
        buf.iter_mut()
            .enumerate()
            .for_each(|(j, b)| *b = out[(i, j)]);
        fwht(&mut buf);
        for (j, b) in buf.iter().enumerate() {
            out[(i, j)] = b / len as f64;
        }
    }
    out
}

/// Diagonal matrix of Hamming weights `X_xx = |x|`.
pub fn weight_diagonal(n: usize) -> Matrix {
    Matrix::from_diagonal(&DVector::from_fn(1 << n, |x, _| x.count_ones() as f64))
}

/// Largest absolute entry of `a − b`.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
