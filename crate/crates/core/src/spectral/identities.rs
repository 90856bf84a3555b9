//! Identities relating `A_f` to the hypercube adjacency in the Hadamard basis.

use nalgebra::DVector;
use serde::Serialize;

use super::lambda;
use crate::error::{check_arity, Result};
use crate::linalg::{self, Matrix};
use crate::transform::fwht;
use crate::truth_table::TruthTable;

pub const IDENTITY_CAP: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HadamardReport {
    /// `2A_f = A_H − diag(g)·A_H·diag(g)` entrywise, in integers.
    pub identity_exact: bool,
    /// Largest entry of `|H·A_H·H − (n·I − 2X)|`.
    pub conjugation_residual: f64,
    /// Top eigenvalue of `RXR − X`, `R = H·diag(g)·H`.
    pub rxr_top: f64,
    pub lambda: f64,
    pub holds: bool,
}

/// `R_xy = ĝ(x⊕y)` for `g = 1 − 2f`, i.e. `H·diag(g)·H`.
fn signed_r(f: &TruthTable) -> Matrix {
    let len = f.len();
    let mut ghat: Vec<f64> = f.iter().map(|b| if b { -1.0 } else { 1.0 }).collect();
    fwht(&mut ghat);
    Matrix::from_fn(len, len, |x, y| ghat[x ^ y] / len as f64)
}

/// `RXR − X` for `R = H·diag(1−2f)·H`.
pub fn rxr_minus_x(f: &TruthTable) -> Result<Matrix> {
    check_arity("Hadamard-basis identities", f.arity(), IDENTITY_CAP)?;
    let r = signed_r(f);
    let x = linalg::weight_diagonal(f.arity());
    Ok(&r * &x * &r - x)
}

/// Checks `2A_f = A_H − diag(g)·A_H·diag(g)` with `g = 1 − 2f` over every
/// entry, in integers.
pub fn hadamard_identity_exact(f: &TruthTable) -> Result<bool> {
    check_arity("Hadamard-basis identities", f.arity(), IDENTITY_CAP)?;
    let len = f.len();
    let g = |x: usize| 1 - 2 * f.bit(x) as i64;
    let mut ok = true;
    for x in 0..len {
        for y in 0..len {
            let ah = ((x ^ y).count_ones() == 1) as i64;
            let af = (ah == 1 && f.get(x) != f.get(y)) as i64;
            ok &= 2 * af == ah - g(x) * ah * g(y);
        }
    }
    Ok(ok)
}

pub fn hadamard_identities(f: &TruthTable) -> Result<HadamardReport> {
    let n = f.arity();
    let identity_exact = hadamard_identity_exact(f)?;
    let len = f.len();

    let ah = Matrix::from_fn(len, len, |x, y| ((x ^ y).count_ones() == 1) as u8 as f64);
    let expected = Matrix::from_diagonal(&DVector::from_fn(len, |x, _| {
        n as f64 - 2.0 * x.count_ones() as f64
    }));
    let conjugation_residual = linalg::max_abs_diff(&linalg::hadamard_conjugate(&ah), &expected);

    let rxr_top = linalg::top_eigen(&rxr_minus_x(f)?).0;
    let lam = lambda(f)?.lambda;
    Ok(HadamardReport {
        identity_exact,
        conjugation_residual,
        rxr_top,
        lambda: lam,
        holds: identity_exact && conjugation_residual <= 1e-9 && (rxr_top - lam).abs() <= 1e-6,
    })
}
