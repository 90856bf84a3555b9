//! ε-approximate degree by linear programming, and the approximate-operator
//! checks built on approximating polynomials.
//!
//! For `h = 1 − 2f ∈ {±1}` and degree `d`, the best uniform error
//! `E_d(h) = min_{deg p ≤ d} max_x |h(x) − p(x)|` is computed through its
//! dual: maximize `⟨φ, h⟩` over `φ` orthogonal to every character of degree
//! at most `d` with `‖φ‖₁ ≤ 1`. The optimal dual values of the equality rows
//! are the Fourier coefficients of a best approximation `p`.
//!
//! A polynomial `q` ε-approximates `f` in the unit-interval convention when
//! `q ∈ [0, ε]` on `f⁻¹(0)` and `q ∈ [1−ε, 1]` on `f⁻¹(1)`. Such `q` exists at
//! degree `d` iff `E_d(h) ≤ ε/(1−ε)`: shrinking the band `[−e, 1+e]` onto
//! `[0, 1]` turns uniform error `e` into one-sided error `2e/(1+2e)`. The
//! signed convention uses `2q − 1`.

use std::fmt;

use nalgebra::DVector;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{check_arity, Error, Result};
use crate::linalg::{self, Matrix};
use crate::lp::{self, LpOutcome, Scalar, StandardLp};
use crate::poly::{self, MultilinearPolynomial};
use crate::spectral;
use crate::transform::fwht;
use crate::truth_table::TruthTable;

/// Arity cap for the approximate-degree LP.
pub const LP_CAP: usize = 5;
/// Largest arity re-solved in exact rational arithmetic.
pub const EXACT_CAP: usize = 3;
/// Arity cap for the dense operator checks.
pub const OPERATOR_CAP: usize = 10;
/// Tolerance for witness bounds and float feasibility decisions.
pub const LP_TOLERANCE: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    UnitInterval,
    Signed,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::UnitInterval => "unit-interval",
            Convention::Signed => "signed",
        })
    }
}

/// A best uniform approximation of `h = 1 − 2f` at a fixed degree.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevFit {
    pub degree: usize,
    /// `E_d(h)`.
    pub error: f64,
    /// Values of the best approximation `p` on the cube.
    pub values: Vec<f64>,
    /// Optimal dual `φ` (orthogonal to degree `≤ d`, `‖φ‖₁ ≤ 1`).
    pub dual: Vec<f64>,
}

/// Masks of size at most `d`, in increasing mask order.
fn low_sets(n: usize, d: usize) -> Vec<usize> {
    (0..1usize << n)
        .filter(|m| m.count_ones() as usize <= d)
        .collect()
}

fn chi(s: usize, x: usize) -> i64 {
    if (s & x).count_ones() & 1 == 0 {
        1
    } else {
        -1
    }
}

fn build_lp<T: Scalar>(h: &[i64], n: usize, d: usize) -> (StandardLp<T>, Vec<usize>) {
    let len = h.len();
    let sets = low_sets(n, d);
    let mut a: Vec<Vec<T>> = sets
        .iter()
        .map(|&s| {
            let mut row: Vec<T> = (0..len).map(|x| T::from_i64(chi(s, x))).collect();
            row.extend((0..len).map(|x| T::from_i64(-chi(s, x))));
            row.push(T::zero());
            row
        })
        .collect();
    a.push(vec![T::one(); 2 * len + 1]);
    let mut b = vec![T::zero(); sets.len()];
    b.push(T::one());
    let mut c: Vec<T> = h.iter().map(|&v| T::from_i64(v)).collect();
    c.extend(h.iter().map(|&v| T::from_i64(-v)));
    c.push(T::zero());
    (StandardLp { a, b, c }, sets)
}

struct RawFit<T> {
    error: T,
    coefficients: Vec<(usize, T)>,
    dual: Vec<T>,
}

fn solve_fit<T: Scalar>(h: &[i64], n: usize, d: usize) -> Result<RawFit<T>> {
    let (lp, sets) = build_lp::<T>(h, n, d);
    match lp::solve(&lp) {
        LpOutcome::Optimal(s) => {
            let len = h.len();
            let dual = (0..len)
                .map(|x| s.x[x].clone() - s.x[len + x].clone())
                .collect();
            let coefficients = sets
                .iter()
                .zip(&s.y)
                .map(|(&m, y)| (m, y.clone()))
                .collect();
            Ok(RawFit {
                error: s.value,
                coefficients,
                dual,
            })
        }
        other => Err(Error::Lp(format!(
            "unexpected outcome {other:?} at degree {d}"
        ))),
    }
}

fn signed_table(f: &TruthTable) -> Vec<i64> {
    f.iter().map(|b| if b { -1 } else { 1 }).collect()
}

/// Best uniform approximation of `1 − 2f` by polynomials of degree `≤ d`.
pub fn chebyshev_fit(f: &TruthTable, d: usize) -> Result<ChebyshevFit> {
    check_arity("approximate degree", f.arity(), LP_CAP)?;
    let h = signed_table(f);
    let raw = solve_fit::<f64>(&h, f.arity(), d.min(f.arity()))?;
    let values = (0..f.len())
        .map(|x| {
            raw.coefficients
                .iter()
                .map(|&(s, c)| c * chi(s, x) as f64)
                .sum()
        })
        .collect();
    Ok(ChebyshevFit {
        degree: d,
        error: raw.error,
        values,
        dual: raw.dual,
    })
}

/// `E_d(1 − 2f)` in exact arithmetic.
pub fn chebyshev_error_exact(f: &TruthTable, d: usize) -> Result<BigRational> {
    check_arity("exact approximate degree", f.arity(), EXACT_CAP)?;
    Ok(solve_fit::<BigRational>(&signed_table(f), f.arity(), d.min(f.arity()))?.error)
}

/// Why degree `d − 1` is impossible: a dual `φ ⊥` degree `≤ d−1` with
/// `‖φ‖₁ = 1` and `⟨φ, h⟩ > ε/(1−ε)`. Any `p` of degree `≤ d−1` within the
/// threshold of `h` would force `⟨φ, h⟩ = ⟨φ, h − p⟩ ≤ ε/(1−ε)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimalityCertificate {
    pub degree: usize,
    pub correlation: f64,
    pub threshold: f64,
    /// Certified in exact rational arithmetic.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxDegreeResult {
    pub epsilon: f64,
    pub degree: usize,
    pub witness: MultilinearPolynomial<f64>,
    pub convention: Convention,
    /// Smallest margin of the witness to its bounds (negative if violated).
    pub slack: f64,
    /// `E_d(1 − 2f)` at the reported degree.
    pub uniform_error: f64,
    pub certificate: Option<MinimalityCertificate>,
}

impl ApproxDegreeResult {
    /// Witness as JSON with 1-based variable lists.
    pub fn witness_json(&self) -> serde_json::Value {
        polynomial_json(&self.witness, self.convention, self.epsilon)
    }
}

pub fn polynomial_json(
    p: &MultilinearPolynomial<f64>,
    convention: Convention,
    epsilon: f64,
) -> serde_json::Value {
    let coeffs: Vec<serde_json::Value> = p
        .terms()
        .map(|(m, c)| {
            let vars: Vec<usize> = poly::mask_vars(m).into_iter().map(|i| i + 1).collect();
            serde_json::json!({ "vars": vars, "value": c })
        })
        .collect();
    serde_json::json!({
        "n": p.arity(),
        "convention": convention.to_string(),
        "epsilon": epsilon,
        "coeffs": coeffs,
    })
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if (0.0..0.5).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::Epsilon(epsilon))
    }
}

/// Smallest degree of an ε-approximating polynomial, with witness and a
/// certificate that one degree less is impossible.
pub fn approx_degree(
    f: &TruthTable,
    epsilon: f64,
    convention: Convention,
) -> Result<ApproxDegreeResult> {
    check_epsilon(epsilon)?;
    let n = f.arity();
    check_arity("approximate degree", n, LP_CAP)?;
    let h = signed_table(f);
    let eps_q = lp::rational_approximation(epsilon, 1_000_000);
    let threshold_q = eps_q.clone() / (BigRational::one() - eps_q);
    let threshold = threshold_q.to_f64();
    let exact = n <= EXACT_CAP;

    let mut previous: Option<(RawFit<f64>, Option<BigRational>)> = None;
    for d in 0..=n {
        let fit = solve_fit::<f64>(&h, n, d)?;
        let (feasible, exact_error) = if exact {
            let e = solve_fit::<BigRational>(&h, n, d)?.error;
            (e <= threshold_q, Some(e))
        } else {
            (fit.error <= threshold + 1e-9, None)
        };
        if !feasible {
            previous = Some((fit, exact_error));
            continue;
        }
        let certificate = previous.map(|(prev, exact_error)| match exact_error {
            Some(e) => MinimalityCertificate {
                degree: d - 1,
                correlation: e.to_f64(),
                threshold,
                exact: true,
            },
            None => MinimalityCertificate {
                degree: d - 1,
                correlation: projected_correlation(&prev.dual, &h, d - 1),
                threshold,
                exact: false,
            },
        });
        if let Some(c) = &certificate {
            if !c.exact && c.correlation <= threshold {
                return Err(Error::Lp(format!(
                    "degree {} rejected but its dual certificate gives {} <= {}",
                    c.degree, c.correlation, threshold
                )));
            }
        }
        let uniform_error = fit.error;
        let witness_values = witness_values(&fit, f.len(), epsilon, convention);
        let slack = witness_slack(f, &witness_values, epsilon, convention);
        let witness = MultilinearPolynomial::interpolate(n, &witness_values);
        let witness = MultilinearPolynomial::from_terms(
            n,
            witness
                .terms()
                .filter(|(_, c)| c.abs() > 1e-12)
                .map(|(m, c)| (m, *c)),
        );
        return Ok(ApproxDegreeResult {
            epsilon,
            degree: d,
            witness,
            convention,
            slack,
            uniform_error,
            certificate,
        });
    }
    unreachable!("degree n always admits an exact representation")
}

/// Projects `φ` onto the orthogonal complement of degree `≤ d`, rescales
/// to unit L1 norm and returns `⟨φ, h⟩`.
fn projected_correlation(phi: &[f64], h: &[i64], d: usize) -> f64 {
    let len = phi.len();
    let mut spec = phi.to_vec();
    fwht(&mut spec);
    for (s, v) in spec.iter_mut().enumerate() {
        if s.count_ones() as usize <= d {
            *v = 0.0;
        }
    }
    fwht(&mut spec);
    spec.iter_mut().for_each(|v| *v /= len as f64);
    let l1: f64 = spec.iter().map(|v| v.abs()).sum();
    if l1 == 0.0 {
        return 0.0;
    }
    spec.iter()
        .zip(h)
        .map(|(p, &hv)| p * hv as f64)
        .sum::<f64>()
        / l1
}

/// Maps the approximation `p ≈ 1 − 2f` into the requested convention.
fn witness_values(fit: &RawFit<f64>, len: usize, epsilon: f64, convention: Convention) -> Vec<f64> {
    // e = target uniform error for f itself
    let e = epsilon / (2.0 * (1.0 - epsilon));
    (0..len)
        .map(|x| {
            let p: f64 = fit
                .coefficients
                .iter()
                .map(|&(s, c)| c * chi(s, x) as f64)
                .sum();
            let pf = (1.0 - p) / 2.0;
            let unit = (pf + e) / (1.0 + 2.0 * e);
            match convention {
                Convention::UnitInterval => unit,
                Convention::Signed => 2.0 * unit - 1.0,
            }
        })
        .collect()
}

/// Margin of `values` against the convention's bounds (≥ 0 when feasible).
pub fn witness_slack(f: &TruthTable, values: &[f64], epsilon: f64, convention: Convention) -> f64 {
    let (lo0, hi0, lo1, hi1) = match convention {
        Convention::UnitInterval => (0.0, epsilon, 1.0 - epsilon, 1.0),
        Convention::Signed => (-1.0, -1.0 + 2.0 * epsilon, 1.0 - 2.0 * epsilon, 1.0),
    };
    values
        .iter()
        .enumerate()
        .map(|(x, &q)| {
            let (lo, hi) = if f.get(x) { (lo1, hi1) } else { (lo0, hi0) };
            (q - lo).min(hi - q)
        })
        .fold(f64::INFINITY, f64::min)
}

/// `adeg_ε` with the default `ε = 1/3`.
pub fn adeg(f: &TruthTable) -> Result<usize> {
    Ok(approx_degree(f, 1.0 / 3.0, Convention::UnitInterval)?.degree)
}

/// `R̃ = H·diag(q)·H`; requires `max_x |q(x)| ≤ 1`.
pub fn r_tilde(q: &MultilinearPolynomial<f64>) -> Result<Matrix> {
    check_arity("dense operator checks", q.arity(), OPERATOR_CAP)?;
    let sup = q.sup_norm();
    if sup > 1.0 + 1e-9 {
        return Err(Error::Precondition(format!("sup norm {sup} exceeds 1")));
    }
    Ok(r_tilde_unchecked(q))
}

pub(crate) fn r_tilde_unchecked(q: &MultilinearPolynomial<f64>) -> Matrix {
    let d = Matrix::from_diagonal(&DVector::from_vec(q.values()));
    linalg::hadamard_conjugate(&d)
}

/// Band sparsity of `R̃`: entries vanish beyond Hamming distance `deg(q)`
/// and equal `q̂(x⊕y)` elsewhere.
pub fn check_sparsity(q: &MultilinearPolynomial<f64>) -> Result<bool> {
    let r = r_tilde(q)?;
    let qhat = q.fourier_coefficients();
    let d = q.degree_with_tolerance(1e-12);
    let len = qhat.len();
    Ok((0..len).all(|x| {
        (0..len).all(|y| {
            let v = r[(x, y)];
            if (x ^ y).count_ones() as usize > d {
                v.abs() <= 1e-10
            } else {
                (v - qhat[x ^ y]).abs() <= 1e-10
            }
        })
    }))
}

/// Tail inequality `Σ_{i≥r} c_i ≤ Σ_{j≥r−d} b_j` for `r = d+1..=n`, with
/// `c_i` and `b_j` the squared masses of `R·v` and `v` on Hamming levels.
pub fn check_cibj(r: &Matrix, v: &[f64], d: usize) -> Result<bool> {
    let len = v.len();
    if !r.is_square() || r.nrows() != len || !len.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "{}x{} operator against a vector of length {len}",
            r.nrows(),
            r.ncols()
        )));
    }
    let n = len.trailing_zeros() as usize;
    let rv = r * DVector::from_column_slice(v);
    let mut c = vec![0.0; n + 1];
    let mut b = vec![0.0; n + 1];
    for x in 0..len {
        let w = x.count_ones() as usize;
        c[w] += rv[x] * rv[x];
        b[w] += v[x] * v[x];
    }
    Ok((d + 1..=n).all(|r| {
        let lhs: f64 = c[r..].iter().sum();
        let rhs: f64 = b[r - d..].iter().sum();
        lhs <= rhs + 1e-8
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticFormReport {
    /// Top eigenvalue of `R̃XR̃ − X`.
    pub mu: f64,
    pub lambda: f64,
    pub degree: usize,
    pub epsilon: f64,
    /// `max_x |q(x) − g(x)|` up to the global sign of `g = 1 − 2f`.
    pub sup_error: f64,
    pub holds: bool,
}

/// Checks `μ ≤ deg(q)` and `λ(f) ≤ μ + 3εn` where `μ` is the top eigenvalue
/// of `R̃XR̃ − X` and `ε` bounds `|q − g|` on the cube.
pub fn check_quadratic_form_bound(
    f: &TruthTable,
    q: &MultilinearPolynomial<f64>,
    epsilon: f64,
) -> Result<QuadraticFormReport> {
    let n = f.arity();
    check_arity("the quadratic form bound", n, 8)?;
    if q.arity() != n {
        return Err(Error::Dimension(format!(
            "polynomial on {} bits, function on {n}",
            q.arity()
        )));
    }
    let r = r_tilde_unchecked(q);
    let x = linalg::weight_diagonal(n);
    let mu = linalg::top_eigen(&(&r * &x * &r - x)).0;
    let lambda = spectral::lambda(f)?.lambda;
    let degree = q.degree_with_tolerance(1e-9);
    let values = q.values();
    let err = |sign: f64| {
        values
            .iter()
            .enumerate()
            .map(|(x, v)| (v - sign * (1.0 - 2.0 * f.bit(x) as f64)).abs())
            .fold(0.0, f64::max)
    };
    let sup_error = err(1.0).min(err(-1.0));
    Ok(QuadraticFormReport {
        mu,
        lambda,
        degree,
        epsilon,
        sup_error,
        holds: mu <= degree as f64 + 1e-6 && lambda <= mu + 3.0 * epsilon * n as f64 + 1e-6,
    })
}

/// Exact `±1` representation `g = 1 − 2f` as a polynomial.
pub fn signed_polynomial(f: &TruthTable) -> MultilinearPolynomial<f64> {
    let values: Vec<f64> = f.iter().map(|b| if b { -1.0 } else { 1.0 }).collect();
    MultilinearPolynomial::interpolate(f.arity(), &values)
}

/// Exact `2f − 1`, the signed convention's target.
pub fn signed_target(f: &TruthTable) -> MultilinearPolynomial<f64> {
    signed_polynomial(f).map(|c| -c)
}

/// Degree at which the float LP first reaches uniform error 0; equals
/// `deg(f)` and is used as a cross-check of the LP.
pub fn zero_error_degree(f: &TruthTable) -> Result<usize> {
    for d in 0..=f.arity() {
        if chebyshev_fit(f, d)?.error <= 1e-9 {
            return Ok(d);
        }
    }
    Ok(f.arity())
}
