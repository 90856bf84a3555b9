//! Dense two-phase tableau simplex, generic over `f64` and exact rationals.
//!
//! Solves `max cᵀx` subject to `Ax = b`, `x ≥ 0`, `b ≥ 0`, with Bland's rule
//! for termination. Optimal solutions come with dual values `y` for the
//! equality rows (`Aᵀy ≥ c`, `bᵀy = cᵀx`).

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

pub trait Scalar: Clone + Debug + PartialOrd + Num + Neg<Output = Self> {
    fn from_i64(v: i64) -> Self;
    /// Magnitudes at or below this count as zero.
    fn tolerance() -> Self;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn tolerance() -> Self {
        1e-11
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

fn positive<T: Scalar>(v: &T) -> bool {
    *v > T::tolerance()
}

fn negative<T: Scalar>(v: &T) -> bool {
    *v < -T::tolerance()
}

#[derive(Clone, Debug)]
pub struct StandardLp<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub value: T,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    Infeasible,
    Unbounded,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    obj: Vec<T>,
    basis: Vec<usize>,
    /// Columns allowed to enter the basis.
    enterable: usize,
}

impl<T: Scalar> Tableau<T> {
    fn width(&self) -> usize {
        self.obj.len() - 1
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = v.clone() - factor.clone() * pv.clone();
            }
            row[col] = T::zero();
        }
        let factor = self.obj[col].clone();
        if !factor.is_zero() {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v = v.clone() - factor.clone() * pv.clone();
            }
            self.obj[col] = T::zero();
        }
        self.basis[r] = col;
    }

    /// Runs simplex iterations; `false` means unbounded.
    fn optimize(&mut self) -> bool {
        let rhs = self.width();
        loop {
            let Some(col) = (0..self.enterable).find(|&j| negative(&self.obj[j])) else {
                return true;
            };
            let mut best: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !positive(&row[col]) {
                    continue;
                }
                let ratio = row[rhs].clone() / row[col].clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }
}

pub fn solve<T: Scalar>(lp: &StandardLp<T>) -> LpOutcome<T> {
    let m = lp.b.len();
    let k = lp.c.len();
    assert!(lp.a.len() == m && lp.a.iter().all(|r| r.len() == k));
    assert!(
        lp.b.iter().all(|v| !negative(v)),
        "right-hand side must be nonnegative"
    );
    let width = k + m;
    let rows: Vec<Vec<T>> = (0..m)
        .map(|i| {
            let mut row = lp.a[i].clone();
            row.extend((0..m).map(|j| if i == j { T::one() } else { T::zero() }));
            row.push(lp.b[i].clone());
            row
        })
        .collect();
    // phase 1: maximize −Σ artificials
    let mut obj = vec![T::zero(); width + 1];
    for row in &rows {
        for j in 0..k {
            obj[j] = obj[j].clone() - row[j].clone();
        }
        obj[width] = obj[width].clone() - row[width].clone();
    }
    let mut t = Tableau {
        rows,
        obj,
        basis: (k..k + m).collect(),
        enterable: k,
    };
    t.optimize();
    if negative(&t.obj[width]) {
        return LpOutcome::Infeasible;
    }
    // drive artificials out of the basis where possible
    for r in 0..m {
        if t.basis[r] >= k {
            if let Some(col) = (0..k).find(|&j| {
                let v = &t.rows[r][j];
                positive(v) || negative(v)
            }) {
                t.pivot(r, col);
            }
        }
    }
    // phase 2
    let cost = |j: usize| if j < k { lp.c[j].clone() } else { T::zero() };
    let mut obj: Vec<T> = (0..=width)
        .map(|j| if j < width { -cost(j) } else { T::zero() })
        .collect();
    for (r, row) in t.rows.iter().enumerate() {
        let cb = cost(t.basis[r]);
        if cb.is_zero() {
            continue;
        }
        for (o, v) in obj.iter_mut().zip(row) {
            *o = o.clone() + cb.clone() * v.clone();
        }
    }
    t.obj = obj;
    if !t.optimize() {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![T::zero(); k];
    for (r, &j) in t.basis.iter().enumerate() {
        if j < k {
            x[j] = t.rows[r][width].clone();
        }
    }
    let y = (0..m).map(|i| t.obj[k + i].clone()).collect();
    LpOutcome::Optimal(LpSolution {
        x,
        y,
        value: t.obj[width].clone(),
    })
}

/// Closest rational with denominator at most `max_den`, by continued
/// fractions. Used to read decimal inputs such as `0.3333333333333333`
/// back as `1/3`.
pub fn rational_approximation(v: f64, max_den: i64) -> BigRational {
    assert!(v.is_finite());
    let (mut h0, mut h1, mut k0, mut k1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = v;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-15 || (h1 as f64 / k1 as f64 - v).abs() < 1e-15 {
            break;
        }
        r = frac.recip();
    }
    BigRational::new(BigInt::from(h1), BigInt::from(k1))
}
