//! Multilinear polynomials, Fourier spectra and the degree measures.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Num;

use crate::transform;
use crate::truth_table::TruthTable;

/// A multilinear polynomial `Σ_S c_S · Π_{i∈S} x_i` on `n` variables.
///
/// Monomials are keyed by the bitmask of their variable set. Zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Debug)]
pub struct MultilinearPolynomial<C = i64> {
    n: usize,
    coeffs: BTreeMap<u32, C>,
}

impl<C: Num + Clone> MultilinearPolynomial<C> {
    pub fn zero(n: usize) -> Self {
        MultilinearPolynomial {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    /// Collects `(mask, coefficient)` pairs, summing repeated masks.
    ///
    /// Panics if a mask mentions a variable outside `0..n`.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (u32, C)>) -> Self {
        let mut coeffs: BTreeMap<u32, C> = BTreeMap::new();
        for (mask, c) in terms {
            assert!(
                n >= 32 || mask >> n == 0,
                "monomial {mask:#b} outside {n} variables"
            );
            let slot = coeffs.entry(mask).or_insert_with(C::zero);
            *slot = slot.clone() + c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        MultilinearPolynomial { n, coeffs }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, mask: u32) -> C {
        self.coeffs.get(&mask).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &C)> {
        self.coeffs.iter().map(|(m, c)| (*m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest monomial size with a nonzero coefficient; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs
            .keys()
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn evaluate(&self, x: usize) -> C {
        self.coeffs
            .iter()
            .filter(|(m, _)| (**m as usize) & !x == 0)
            .fold(C::zero(), |acc, (_, c)| acc + c.clone())
    }

    /// Values at every point of the cube, in index order.
    pub fn values(&self) -> Vec<C> {
        let len = 1usize << self.n;
        let mut out = vec![C::zero(); len];
        for (&mask, c) in &self.coeffs {
            let mask = mask as usize;
            let free = (len - 1) & !mask;
            // enumerate supersets of `mask`
            let mut sub = free;
            loop {
                let x = sub | mask;
                out[x] = out[x].clone() + c.clone();
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & free;
            }
        }
        out
    }

    pub fn map<D: Num + Clone>(&self, f: impl Fn(&C) -> D) -> MultilinearPolynomial<D> {
        MultilinearPolynomial::from_terms(self.n, self.coeffs.iter().map(|(m, c)| (*m, f(c))))
    }
}

impl MultilinearPolynomial<f64> {
    /// Degree ignoring coefficients of magnitude at most `tol`.
    pub fn degree_with_tolerance(&self, tol: f64) -> usize {
        self.coeffs
            .iter()
            .filter(|(_, c)| c.abs() > tol)
            .map(|(m, _)| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Interpolates real values on the cube (index order) by Möbius inversion.
    pub fn interpolate(n: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), 1 << n);
        let mut a = values.to_vec();
        transform::mobius(&mut a);
        Self::from_terms(n, a.into_iter().enumerate().map(|(m, c)| (m as u32, c)))
    }

    /// Fourier coefficients `ĝ(S) = E_x[g(x)(−1)^{|S∩x|}]` of the polynomial's values.
    pub fn fourier_coefficients(&self) -> Vec<f64> {
        let mut v = self.values();
        transform::fwht(&mut v);
        let scale = 1.0 / v.len() as f64;
        v.iter_mut().for_each(|c| *c *= scale);
        v
    }

    pub fn sup_norm(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl<C: Num + Clone + fmt::Display + PartialOrd> fmt::Display for MultilinearPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&u32, &C)> = self.coeffs.iter().collect();
        terms.sort_by_key(|(m, _)| (m.count_ones(), **m));
        for (k, (&mask, c)) in terms.into_iter().enumerate() {
            let negative = *c < C::zero();
            let magnitude = if negative {
                C::zero() - c.clone()
            } else {
                c.clone()
            };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = (0..32)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| format!("x{}", i + 1))
                .collect();
            if vars.is_empty() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{magnitude}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Fourier spectrum of a Boolean function with exact dyadic values.
///
/// `f̂(S) = numerator(S) / 2^n`, with `numerator(S) = Σ_x f(x)(−1)^{|S∩x|}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FourierSpectrum {
    n: usize,
    numerators: Vec<i64>,
}

impl FourierSpectrum {
    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn numerator(&self, mask: usize) -> i64 {
        self.numerators[mask]
    }

    pub fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    pub fn value(&self, mask: usize) -> f64 {
        self.numerators[mask] as f64 / (1u64 << self.n) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.numerators.len()).map(|s| self.value(s)).collect()
    }

    /// `max{|S| : f̂(S) ≠ 0}`, decided exactly.
    pub fn degree(&self) -> usize {
        self.numerators
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(s, _)| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// `2^{2n}·Σ_S f̂(S)²`, to be compared exactly against `2^n·Σ_x f(x)²`.
    pub fn scaled_energy(&self) -> i128 {
        self.numerators
            .iter()
            .map(|&c| (c as i128) * (c as i128))
            .sum()
    }
}

/// The unique multilinear polynomial agreeing with `f` on the cube.
pub fn mobius(f: &TruthTable) -> MultilinearPolynomial<i64> {
    let mut a: Vec<i64> = f.iter().map(i64::from).collect();
    transform::mobius(&mut a);
    MultilinearPolynomial::from_terms(
        f.arity(),
        a.into_iter().enumerate().map(|(m, c)| (m as u32, c)),
    )
}

/// Real degree of `f`.
pub fn degree(f: &TruthTable) -> usize {
    let mut a: Vec<i64> = f.iter().map(i64::from).collect();
    transform::mobius(&mut a);
    max_support_size(a.iter().map(|c| *c != 0))
}

/// Algebraic normal form coefficients of `f` over GF(2), indexed by monomial mask.
pub fn anf(f: &TruthTable) -> Vec<bool> {
    let mut a: Vec<bool> = f.iter().collect();
    transform::reed_muller(&mut a);
    a
}

/// Degree of `f` as a polynomial over GF(2).
pub fn degree_gf2(f: &TruthTable) -> usize {
    max_support_size(anf(f).into_iter())
}

pub fn fourier(f: &TruthTable) -> FourierSpectrum {
    let mut a: Vec<i64> = f.iter().map(i64::from).collect();
    transform::fwht(&mut a);
    FourierSpectrum {
        n: f.arity(),
        numerators: a,
    }
}

fn max_support_size(nonzero: impl Iterator<Item = bool>) -> usize {
    nonzero
        .enumerate()
        .filter(|(_, nz)| *nz)
        .map(|(s, _)| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Zero-based indices of the variables in `mask`.
pub fn mask_vars(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}
