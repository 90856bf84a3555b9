//! γ₂ factorization certificates and the chain
//! `λ(f) ≤ ‖B_q‖/(1−2ε) ≤ γ₂(M)/(1−2ε) ≤ d/(1−2ε)`.

use serde::Serialize;

use crate::approx::{self, Convention};
use crate::error::{check_arity, Error, Result};
use crate::linalg::{self, Matrix};
use crate::poly::MultilinearPolynomial;
use crate::spectral;
use crate::truth_table::TruthTable;

/// Largest `n` accepted by [`build_gamma2_certificate`].
pub const CERTIFICATE_CAP: usize = 64;

/// Largest column L2 norm of `x`.
pub fn column_norm(x: &Matrix) -> f64 {
    x.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gamma2Bound {
    /// `c(X)·c(Y)`, an upper bound on `γ₂(XᵀY)`.
    pub value: f64,
    pub product: Matrix,
}

/// Evaluates the factorization `A = XᵀY`.
pub fn gamma2_upper(x: &Matrix, y: &Matrix) -> Result<Gamma2Bound> {
    if x.nrows() != y.nrows() {
        return Err(Error::Dimension(format!(
            "factors have {} and {} rows",
            x.nrows(),
            y.nrows()
        )));
    }
    Ok(Gamma2Bound {
        value: column_norm(x) * column_norm(y),
        product: x.transpose() * y,
    })
}

/// Factorization `M = SᵀT` of an `(n+1)×(n+1)` matrix with
/// `M_st = s − t` whenever `|s − t| ≤ d`, and `c(S) = c(T) = √d`.
///
/// Row `j < 2d` and column `s` use `a = (s+j) mod 2d`, `b = ⌊(s+j)/2d⌋`:
/// if `a < d` then `S = (−1)^b, T = 0`, otherwise `S = 0, T = −(−1)^b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Gamma2Certificate {
    pub n: usize,
    pub d: usize,
    #[serde(rename = "S")]
    pub s: Vec<Vec<i64>>,
    #[serde(rename = "T")]
    pub t: Vec<Vec<i64>>,
    #[serde(skip)]
    pub m: Vec<Vec<i64>>,
}

pub fn build_gamma2_certificate(n: usize, d: usize) -> Result<Gamma2Certificate> {
    if d == 0 || d > n {
        return Err(Error::Precondition(format!(
            "need 1 <= d <= n, got n = {n}, d = {d}"
        )));
    }
    check_arity("gamma2 certificates", n, CERTIFICATE_CAP)?;
    let rows = 2 * d;
    let mut s = vec![vec![0i64; n + 1]; rows];
    let mut t = vec![vec![0i64; n + 1]; rows];
    for j in 0..rows {
        for col in 0..=n {
            let a = (col + j) % rows;
            let sign = if ((col + j) / rows) & 1 == 0 { 1 } else { -1 };
            if a < d {
                s[j][col] = sign;
            } else {
                t[j][col] = -sign;
            }
        }
    }
    let m = (0..=n)
        .map(|a| {
            (0..=n)
                .map(|b| (0..rows).map(|j| s[j][a] * t[j][b]).sum())
                .collect()
        })
        .collect();
    let cert = Gamma2Certificate { n, d, s, t, m };
    if !cert.column_counts_ok() || !cert.band_ok() {
        return Err(Error::Numerical(format!(
            "certificate ({n}, {d}) failed validation"
        )));
    }
    Ok(cert)
}

impl Gamma2Certificate {
    /// Every column of `S` and of `T` has exactly `d` nonzero `±1` entries,
    /// so `c(S)² = c(T)² = d`.
    pub fn column_counts_ok(&self) -> bool {
        let ok = |x: &Vec<Vec<i64>>| {
            (0..=self.n).all(|c| {
                x.iter().all(|r| r[c].abs() <= 1)
                    && x.iter().filter(|r| r[c] != 0).count() == self.d
            })
        };
        ok(&self.s) && ok(&self.t)
    }

    /// `M_st = s − t` for `|s − t| ≤ d`.
    pub fn band_ok(&self) -> bool {
        (0..=self.n).all(|a| {
            (0..=self.n).all(|b| a.abs_diff(b) > self.d || self.m[a][b] == a as i64 - b as i64)
        })
    }

    /// Squared column norms `(c(S)², c(T)²)`, exact.
    pub fn column_norms_squared(&self) -> (i64, i64) {
        let c = |x: &Vec<Vec<i64>>| {
            (0..=self.n)
                .map(|col| x.iter().map(|r| r[col] * r[col]).sum::<i64>())
                .max()
                .unwrap_or(0)
        };
        (c(&self.s), c(&self.t))
    }

    /// `c(S)·c(T)`.
    pub fn value(&self) -> f64 {
        let (a, b) = self.column_norms_squared();
        ((a * b) as f64).sqrt()
    }

    pub fn s_matrix(&self) -> Matrix {
        to_matrix(&self.s)
    }

    pub fn t_matrix(&self) -> Matrix {
        to_matrix(&self.t)
    }

    pub fn m_matrix(&self) -> Matrix {
        to_matrix(&self.m)
    }

    /// Factors of the `2ⁿ×2ⁿ` matrix `V_xy = M_{|x|,|y|}`, obtained by
    /// duplicating columns of `S` and `T` (column norms are unchanged).
    pub fn lifted_factors(&self, bits: usize) -> Result<(Matrix, Matrix)> {
        if bits != self.n {
            return Err(Error::Dimension(format!(
                "certificate for n = {}, lift to {bits}",
                self.n
            )));
        }
        let len = 1usize << bits;
        let lift = |x: &Vec<Vec<i64>>| {
            Matrix::from_fn(x.len(), len, |j, col| {
                x[j][col.count_ones() as usize] as f64
            })
        };
        Ok((lift(&self.s), lift(&self.t)))
    }
}

fn to_matrix(x: &[Vec<i64>]) -> Matrix {
    let cols = x.first().map_or(0, Vec::len);
    Matrix::from_fn(x.len(), cols, |i, j| x[i][j] as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HadamardBoundReport {
    /// `‖A⊙B‖`.
    pub lhs: f64,
    /// `c(X)·c(Y)·‖B‖`.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `‖A⊙B‖ ≤ c(X)c(Y)·‖B‖` for a factorization `A = XᵀY`.
pub fn hadamard_product_bound(
    a: &Matrix,
    b: &Matrix,
    x: &Matrix,
    y: &Matrix,
) -> Result<HadamardBoundReport> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "{:?} against {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let bound = gamma2_upper(x, y)?;
    if bound.product.shape() != a.shape() || linalg::max_abs_diff(&bound.product, a) > 1e-10 {
        return Err(Error::Precondition(
            "the factorization does not reproduce A".into(),
        ));
    }
    let lhs = linalg::spectral_norm(&a.component_mul(b));
    let rhs = bound.value * linalg::spectral_norm(b);
    Ok(HadamardBoundReport {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-7,
    })
}

/// `(B_q)_xy = (q(x) − q(y))/2` at Hamming distance 1, else 0.
#[derive(Clone, Debug, PartialEq)]
pub struct BqMatrix {
    pub n: usize,
    pub matrix: Matrix,
    pub norm: f64,
    /// `‖W⊙R̃‖` with `W_xy = |x| − |y|` and `R̃ = H·diag(q)·H`.
    pub wr_norm: f64,
}

fn weight_difference(n: usize) -> Matrix {
    let len = 1usize << n;
    Matrix::from_fn(len, len, |x, y| {
        x.count_ones() as f64 - y.count_ones() as f64
    })
}

/// Builds `B_q` for a signed-convention polynomial and checks
/// `‖B_q‖ = ‖W⊙R̃‖`.
pub fn build_bq(f: &TruthTable, q: &MultilinearPolynomial<f64>) -> Result<BqMatrix> {
    let n = f.arity();
    check_arity("B_q matrices", n, 10)?;
    if q.arity() != n {
        return Err(Error::Dimension(format!(
            "polynomial on {} bits, function on {n}",
            q.arity()
        )));
    }
    let values = q.values();
    for (x, &v) in values.iter().enumerate() {
        let right_side = if f.get(x) { v > 0.0 } else { v < 0.0 };
        if !right_side || v.abs() > 1.0 + 1e-7 {
            return Err(Error::Precondition(format!(
                "q({x}) = {v} is not in the signed convention for f({x}) = {}",
                f.bit(x)
            )));
        }
    }
    let len = f.len();
    let matrix = Matrix::from_fn(len, len, |x, y| {
        if (x ^ y).count_ones() == 1 {
            (values[x] - values[y]) / 2.0
        } else {
            0.0
        }
    });
    let r = approx::r_tilde_unchecked(q);
    let wr = weight_difference(n).component_mul(&r);
    let norm = linalg::spectral_norm(&matrix);
    let wr_norm = linalg::spectral_norm(&wr);
    if (norm - wr_norm).abs() > 1e-7 {
        return Err(Error::Numerical(format!(
            "‖B_q‖ = {norm} but ‖W⊙R̃‖ = {wr_norm}"
        )));
    }
    Ok(BqMatrix {
        n,
        matrix,
        norm,
        wr_norm,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainLink {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub n: usize,
    pub epsilon: f64,
    pub degree: usize,
    pub lambda: f64,
    pub bq_norm: f64,
    pub gamma2: f64,
    pub links: Vec<ChainLink>,
    pub holds: bool,
}

fn link(name: &'static str, lhs: f64, rhs: f64) -> ChainLink {
    ChainLink {
        name,
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-6,
    }
}

/// Runs the full certificate chain with the signed LP witness at `ε`.
pub fn certificate_chain(f: &TruthTable, epsilon: f64) -> Result<ChainReport> {
    let n = f.arity();
    let adeg = approx::approx_degree(f, epsilon, Convention::Signed)?;
    let d = adeg.degree;
    let q = &adeg.witness;
    let lambda = spectral::lambda(f)?.lambda;
    let bq = build_bq(f, q)?;
    let scale = 1.0 / (1.0 - 2.0 * epsilon);

    // γ₂ of the weight-level matrix, certified through the lifted factors;
    // for d = 0 the zero matrix already agrees with W on the band.
    let (gamma2, via_factors) = if d == 0 {
        (0.0, bq.norm)
    } else {
        let cert = build_gamma2_certificate(n, d)?;
        let (x, y) = cert.lifted_factors(n)?;
        let v = x.transpose() * &y;
        let r = approx::r_tilde_unchecked(q);
        let vr = v.component_mul(&r);
        let wr = weight_difference(n).component_mul(&r);
        if linalg::max_abs_diff(&vr, &wr) > 1e-9 {
            return Err(Error::Numerical("V⊙R̃ differs from W⊙R̃ on the band".into()));
        }
        (cert.value(), linalg::spectral_norm(&vr))
    };
    let links = vec![
        link("lambda <= |B_q|/(1-2eps)", lambda, bq.norm * scale),
        link("|B_q| = |V.R~|", (bq.norm - via_factors).abs(), 0.0),
        link(
            "|B_q|/(1-2eps) <= gamma2/(1-2eps)",
            bq.norm * scale,
            gamma2 * scale,
        ),
        link(
            "gamma2/(1-2eps) <= d/(1-2eps)",
            gamma2 * scale,
            d as f64 * scale,
        ),
    ];
    let holds = links.iter().all(|l| l.holds);
    Ok(ChainReport {
        n,
        epsilon,
        degree: d,
        lambda,
        bq_norm: bq.norm,
        gamma2,
        links,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::from_family;
    use crate::truth_table::all_functions;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PRINTED_12_3: [[i64; 13]; 13] = [
        [0, -1, -2, -3, -2, -1, 0, 1, 2, 3, 2, 1, 0],
        [1, 0, -1, -2, -3, -2, -1, 0, 1, 2, 3, 2, 1],
        [2, 1, 0, -1, -2, -3, -2, -1, 0, 1, 2, 3, 2],
        [3, 2, 1, 0, -1, -2, -3, -2, -1, 0, 1, 2, 3],
        [2, 3, 2, 1, 0, -1, -2, -3, -2, -1, 0, 1, 2],
        [1, 2, 3, 2, 1, 0, -1, -2, -3, -2, -1, 0, 1],
        [0, 1, 2, 3, 2, 1, 0, -1, -2, -3, -2, -1, 0],
        [-1, 0, 1, 2, 3, 2, 1, 0, -1, -2, -3, -2, -1],
        [-2, -1, 0, 1, 2, 3, 2, 1, 0, -1, -2, -3, -2],
        [-3, -2, -1, 0, 1, 2, 3, 2, 1, 0, -1, -2, -3],
        [-2, -3, -2, -1, 0, 1, 2, 3, 2, 1, 0, -1, -2],
        [-1, -2, -3, -2, -1, 0, 1, 2, 3, 2, 1, 0, -1],
        [0, -1, -2, -3, -2, -1, 0, 1, 2, 3, 2, 1, 0],
    ];

    #[test]
    fn printed_matrix() {
        let c = build_gamma2_certificate(12, 3).unwrap();
        for (row, printed) in c.m.iter().zip(PRINTED_12_3.iter()) {
            assert_eq!(row.as_slice(), printed.as_slice());
        }
        assert_eq!(c.column_norms_squared(), (3, 3));
        let b = gamma2_upper(&c.s_matrix(), &c.t_matrix()).unwrap();
        assert!((b.value - 3.0).abs() < 1e-12);
        assert!(linalg::max_abs_diff(&b.product, &c.m_matrix()) == 0.0);
    }

    #[test]
    fn full_band() {
        for n in 1..=10 {
            let c = build_gamma2_certificate(n, n).unwrap();
            for a in 0..=n {
                for b in 0..=n {
                    assert_eq!(c.m[a][b], a as i64 - b as i64);
                }
            }
        }
    }

    #[test]
    fn all_parameters_through_64() {
        for n in 1..=64 {
            for d in 1..=n {
                let c = build_gamma2_certificate(n, d).unwrap();
                assert!(c.column_counts_ok() && c.band_ok());
                // independent recomputation of SᵀT
                let s = c.s_matrix();
                let t = c.t_matrix();
                let m = s.transpose() * t;
                assert!(linalg::max_abs_diff(&m, &c.m_matrix()) == 0.0);
            }
        }
        assert!(build_gamma2_certificate(3, 0).is_err());
        assert!(build_gamma2_certificate(3, 4).is_err());
    }

    #[test]
    fn gamma2_upper_examples() {
        let id = Matrix::identity(4, 4);
        assert_eq!(gamma2_upper(&id, &id).unwrap().value, 1.0);
        let ones = Matrix::from_element(1, 5, 1.0);
        let b = gamma2_upper(&ones, &ones).unwrap();
        assert_eq!(b.value, 1.0);
        assert_eq!(b.product, Matrix::from_element(5, 5, 1.0));
        assert!(matches!(
            gamma2_upper(&Matrix::zeros(2, 2), &Matrix::zeros(3, 2)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn hadamard_bound_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let b = Matrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
        let b = &b / linalg::spectral_norm(&b);
        let ones = Matrix::from_element(1, 4, 1.0);
        let r = hadamard_product_bound(&Matrix::from_element(4, 4, 1.0), &b, &ones, &ones).unwrap();
        assert!(r.holds && (r.lhs - 1.0).abs() < 1e-9);
        let id = Matrix::identity(4, 4);
        let r = hadamard_product_bound(&id, &b, &id, &id).unwrap();
        assert!(r.holds);
        assert!(hadamard_product_bound(&id, &b, &ones, &ones).is_err());

        let c = build_gamma2_certificate(12, 3).unwrap();
        for _ in 0..20 {
            let b = Matrix::from_fn(13, 13, |_, _| rng.random_range(-1.0..1.0));
            let r =
                hadamard_product_bound(&c.m_matrix(), &b, &c.s_matrix(), &c.t_matrix()).unwrap();
            assert!(r.holds);
        }
    }

    #[test]
    fn bq_examples() {
        let f = from_family("or", &[2]).unwrap();
        let q = approx::signed_target(&f);
        let b = build_bq(&f, &q).unwrap();
        assert!((b.norm - 2f64.sqrt()).abs() < 1e-9);
        let f = from_family("const1", &[3]).unwrap();
        let q = MultilinearPolynomial::from_terms(3, [(0, 1.0)]);
        assert_eq!(build_bq(&f, &q).unwrap().norm, 0.0);
        let f = from_family("and", &[2]).unwrap();
        let w = approx::approx_degree(&f, 1.0 / 3.0, Convention::Signed)
            .unwrap()
            .witness;
        let b = build_bq(&f, &w).unwrap();
        assert!(b.norm >= 2f64.sqrt() / 3.0 - 1e-9);
        for x in 0..4 {
            for y in 0..4 {
                assert!((b.matrix[(x, y)] + b.matrix[(y, x)]).abs() < 1e-15);
            }
        }
        // unit-convention input is rejected
        let unit = approx::approx_degree(&f, 1.0 / 3.0, Convention::UnitInterval)
            .unwrap()
            .witness;
        assert!(matches!(build_bq(&f, &unit), Err(Error::Precondition(_))));
    }

    #[test]
    fn chain_examples() {
        let r = certificate_chain(&from_family("or", &[3]).unwrap(), 0.0).unwrap();
        assert!(r.holds && r.lambda <= r.bq_norm + 1e-9 && r.bq_norm <= 3.0 + 1e-9);
        let r = certificate_chain(&from_family("and", &[2]).unwrap(), 1.0 / 3.0).unwrap();
        assert!(r.holds && r.degree == 1);
        let r = certificate_chain(&from_family("parity", &[2]).unwrap(), 0.0).unwrap();
        assert!(r.holds && (r.bq_norm - 2.0).abs() < 1e-9 && (r.lambda - 2.0).abs() < 1e-9);
        let r = certificate_chain(&from_family("const0", &[2]).unwrap(), 1.0 / 3.0).unwrap();
        assert!(r.holds && r.degree == 0 && r.bq_norm == 0.0);
    }

    #[test]
    fn chain_exhaustive_three() {
        for f in all_functions(3).unwrap() {
            for eps in [0.0, 1.0 / 3.0] {
                let r = certificate_chain(&f, eps).unwrap();
                assert!(r.holds, "{f} {eps}: {r:?}");
            }
        }
    }
}
