//! The signed hypercube matrix `Bₙ` and the degree-to-sensitivity witness.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::SensitivityGraph;
use crate::error::{check_arity, Error, Result};
use crate::poly;
use crate::truth_table::TruthTable;

/// Arity cap for building and validating `Bₙ`.
pub const SIGNING_CAP: usize = 12;
/// Arity cap for the eigenvector witness.
pub const WITNESS_CAP: usize = 10;

/// `B₁ = [[0,1],[1,0]]`, `Bᵢ = [[Bᵢ₋₁, I], [I, −Bᵢ₋₁]]`, with the top block
/// split on the highest input bit.
///
/// The entry at `(x, x⊕eⱼ)` is `(−1)^{|x >> (j+1)|}`: the identity blocks
/// carry `+1`, and every higher bit set in `x` puts the entry in a negated
/// copy. All other entries are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigningMatrix {
    n: usize,
}

pub fn signing_matrix(n: usize) -> Result<SigningMatrix> {
    if n == 0 {
        return Err(Error::Precondition(
            "the signing matrix needs n >= 1".into(),
        ));
    }
    check_arity("signing matrices", n, SIGNING_CAP)?;
    let b = SigningMatrix { n };
    if !b.square_is_scaled_identity() || b.trace() != 0 {
        return Err(Error::Numerical(format!("B_{n} failed validation")));
    }
    Ok(b)
}

impl SigningMatrix {
    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn sign(x: usize, j: usize) -> i64 {
        if (x >> (j + 1)).count_ones() & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn entry(&self, x: usize, y: usize) -> i64 {
        let d = x ^ y;
        if d.count_ones() == 1 {
            Self::sign(x, d.trailing_zeros() as usize)
        } else {
            0
        }
    }

    /// Nonzero entries of row `x` as `(column, value)`, by direction.
    pub fn row(&self, x: usize) -> impl Iterator<Item = (usize, i64)> {
        (0..self.n).map(move |j| (x ^ 1 << j, Self::sign(x, j)))
    }

    /// Checks `Bₙ² = n·I` row by row in exact integer arithmetic.
    pub fn square_is_scaled_identity(&self) -> bool {
        let mut acc = vec![0i64; self.dim()];
        let mut touched = Vec::new();
        for x in 0..self.dim() {
            for (y, a) in self.row(x) {
                for (z, b) in self.row(y) {
                    if acc[z] == 0 {
                        touched.push(z);
                    }
                    acc[z] += a * b;
                }
            }
            let ok = touched
                .iter()
                .all(|&z| acc[z] == if z == x { self.n as i64 } else { 0 })
                && acc[x] == self.n as i64;
            for &z in &touched {
                acc[z] = 0;
            }
            touched.clear();
            if !ok {
                return false;
            }
        }
        true
    }

    pub fn trace(&self) -> i64 {
        (0..self.dim()).map(|x| self.entry(x, x)).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        (0..self.dim())
            .map(|x| (0..self.dim()).map(|y| self.entry(x, y)).collect())
            .collect()
    }

    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (x, o) in out.iter_mut().enumerate() {
            *o = self.row(x).map(|(y, s)| s as f64 * v[y]).sum();
        }
    }

    /// Writes the matrix as comma-separated integer rows.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        for x in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|y| self.entry(x, y).to_string())
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    V0,
    V1,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HuangWitness {
    pub n: usize,
    /// `|{x : f(x) = parity(x)}|`.
    pub v0_size: usize,
    pub v1_size: usize,
    /// The side the eigenvector vanishes on (the smaller one).
    pub vanishing_side: Side,
    /// `v′ = |v|`, unit norm.
    pub vector: Vec<f64>,
    /// `‖Bₙ v − √n v‖` for the signed vector before taking magnitudes.
    pub eigen_residual: f64,
    /// `‖A_f v′‖ / ‖v′‖`.
    pub ratio: f64,
    pub holds: bool,
}

/// Restricts `f` to a subcube on which it has full degree: variables
/// outside a top-degree monomial of the multilinear representation are
/// set to 0. Returns the restriction and the assignment used.
pub fn max_degree_subcube(f: &TruthTable) -> Result<(TruthTable, Vec<(usize, bool)>)> {
    let p = poly::mobius(f);
    let deg = p.degree();
    let top = p
        .terms()
        .map(|(m, _)| m)
        .find(|m| m.count_ones() as usize == deg)
        .unwrap_or(0);
    let assignment: Vec<(usize, bool)> = (0..f.arity())
        .filter(|i| top >> i & 1 == 0)
        .map(|i| (i, false))
        .collect();
    Ok((f.restrict(&assignment)?, assignment))
}

/// Builds the witness vector for `deg(f) = n`: a `+√n` eigenvector of
/// `Bₙ` vanishing on the smaller of `V₀ = {x : f(x) = parity(x)}` and its
/// complement, whose magnitudes satisfy `‖A_f v′‖ ≥ √n‖v′‖`.
pub fn huang_witness(f: &TruthTable) -> Result<HuangWitness> {
    let n = f.arity();
    check_arity("the degree witness", n, WITNESS_CAP)?;
    if n == 0 {
        return Err(Error::Precondition("the witness needs n >= 1".into()));
    }
    let deg = poly::degree(f);
    if deg != n {
        return Err(Error::Precondition(format!(
            "deg(f) = {deg} < n = {n}; restrict to a full-degree subcube first"
        )));
    }
    let len = f.len();
    let in_v0 = |x: usize| f.get(x) == (x.count_ones() % 2 == 1);
    let v0_size = (0..len).filter(|&x| in_v0(x)).count();
    let v1_size = len - v0_size;
    if v0_size == v1_size {
        return Err(Error::Precondition(
            "|V0| = |V1| although deg(f) = n".into(),
        ));
    }
    let vanishing_side = if v0_size < v1_size {
        Side::V0
    } else {
        Side::V1
    };
    let vanish: Vec<usize> = (0..len)
        .filter(|&x| in_v0(x) == (vanishing_side == Side::V0))
        .collect();

    // The +√n eigenspace of Bₙ = [[B, I], [I, −B]] is spanned by the
    // columns of E = [I; √n·I − B] with B = Bₙ₋₁.
    let half = len / 2;
    let rt = (n as f64).sqrt();
    let inner = SigningMatrix { n: n - 1 };
    let e_row = |x: usize| -> Vec<f64> {
        let mut row = vec![0.0; half];
        if x < half {
            row[x] = 1.0;
        } else {
            let y = x - half;
            row[y] = rt;
            if n > 1 {
                for (z, s) in inner.row(y) {
                    row[z] -= s as f64;
                }
            }
        }
        row
    };
    let es = DMatrix::from_fn(vanish.len(), half, |r, c| e_row(vanish[r])[c]);
    let gram = es.transpose() * &es;
    let eig = SymmetricEigen::new(gram);
    let k = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap();
    let a: DVector<f64> = eig.eigenvectors.column(k).into_owned();
    let constraint = (&es * &a).norm();
    if constraint > 1e-8 {
        return Err(Error::Numerical(format!(
            "no eigenvector vanishes on the smaller side (residual {constraint:e})"
        )));
    }
    let mut v: Vec<f64> = (0..len)
        .map(|x| e_row(x).iter().zip(a.iter()).map(|(p, q)| p * q).sum())
        .collect();
    let full = SigningMatrix { n };
    let mut bv = vec![0.0; len];
    full.apply(&v, &mut bv);
    let eigen_residual = bv
        .iter()
        .zip(&v)
        .map(|(p, q)| (p - rt * q).powi(2))
        .sum::<f64>()
        .sqrt();
    for &x in &vanish {
        v[x] = 0.0;
    }
    let scale = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let vector: Vec<f64> = v.iter().map(|a| a.abs() / scale).collect();
    let g = SensitivityGraph::new(f);
    let mut av = vec![0.0; len];
    g.apply(&vector, &mut av);
    let ratio = av.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok(HuangWitness {
        n,
        v0_size,
        v1_size,
        vanishing_side,
        vector,
        eigen_residual,
        ratio,
        holds: ratio >= rt - 1e-8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::from_family;
    use crate::truth_table::all_functions;

    /// Oracle: the block recursion, built literally.
    fn recursive(n: usize) -> Vec<Vec<i64>> {
        if n == 1 {
            return vec![vec![0, 1], vec![1, 0]];
        }
        let b = recursive(n - 1);
        let h = b.len();
        let mut out = vec![vec![0; 2 * h]; 2 * h];
        for i in 0..h {
            for j in 0..h {
                out[i][j] = b[i][j];
                out[h + i][h + j] = -b[i][j];
            }
            out[i][h + i] = 1;
            out[h + i][i] = 1;
        }
        out
    }

    #[test]
    fn closed_form_matches_recursion() {
        for n in 1..=7 {
            assert_eq!(
                signing_matrix(n).unwrap().to_dense(),
                recursive(n),
                "n = {n}"
            );
        }
        assert_eq!(
            signing_matrix(1).unwrap().to_dense(),
            vec![vec![0, 1], vec![1, 0]]
        );
    }

    #[test]
    fn dense_square_oracle() {
        for n in 1..=5 {
            let b = recursive(n);
            let len = b.len();
            for i in 0..len {
                for j in 0..len {
                    let s: i64 = (0..len).map(|k| b[i][k] * b[k][j]).sum();
                    assert_eq!(s, if i == j { n as i64 } else { 0 });
                }
            }
        }
    }

    #[test]
    fn validation_through_twelve() {
        for n in 1..=12 {
            let b = signing_matrix(n).unwrap();
            assert!(b.square_is_scaled_identity());
            assert_eq!(b.trace(), 0);
        }
        assert!(signing_matrix(13).is_err());
        assert!(signing_matrix(0).is_err());
    }

    #[test]
    fn zero_pattern_is_the_hypercube() {
        let b = signing_matrix(4).unwrap();
        for x in 0..16 {
            for y in 0..16 {
                assert_eq!(b.entry(x, y) != 0, (x ^ y).count_ones() == 1);
            }
        }
    }

    #[test]
    fn witness_examples() {
        let w = huang_witness(&from_family("and", &[2]).unwrap()).unwrap();
        // parity: 00→0, 01→1, 10→1, 11→0; AND agrees only at 00
        assert_eq!((w.v0_size, w.v1_size), (1, 3));
        assert_eq!(w.vanishing_side, Side::V0);
        assert!(w.holds && w.ratio >= 2f64.sqrt() - 1e-8);
        for n in 1..=6 {
            let w = huang_witness(&from_family("parity", &[n]).unwrap()).unwrap();
            assert_eq!(w.v1_size, 0);
            assert!(w.holds);
        }
        let w = huang_witness(&from_family("or", &[2]).unwrap()).unwrap();
        assert_eq!((w.v0_size, w.v1_size), (3, 1));
        assert!(w.holds);
    }

    #[test]
    fn witness_vector_properties() {
        let f = from_family("maj", &[3]).unwrap();
        let w = huang_witness(&f).unwrap();
        assert!(w.eigen_residual < 1e-9);
        assert!(w.vector.iter().all(|&a| a >= 0.0));
        let norm: f64 = w.vector.iter().map(|a| a * a).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn witness_exhaustive_small() {
        for n in 1..=3 {
            for f in all_functions(n).unwrap() {
                if poly::degree(&f) == n {
                    let w = huang_witness(&f).unwrap();
                    assert!(w.holds, "{f}: {}", w.ratio);
                } else {
                    assert!(matches!(huang_witness(&f), Err(Error::Precondition(_))));
                }
            }
        }
    }

    #[test]
    fn subcube_restriction_has_full_degree() {
        let f = from_family("threshold", &[4, 4]).unwrap();
        let (g, asg) = max_degree_subcube(&f).unwrap();
        assert!(asg.is_empty());
        assert_eq!(g, f);
        let f = TruthTable::from_fn(3, |x| x & 0b011 == 0b011).unwrap();
        let (g, asg) = max_degree_subcube(&f).unwrap();
        assert_eq!(asg, vec![(2, false)]);
        assert_eq!(poly::degree(&g), g.arity());
    }
}
