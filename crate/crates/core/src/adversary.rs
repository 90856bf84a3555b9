//! Single-bit adversary weight schemes: the symmetric edge-weight witness
//! that attains `λ(f)`, and the minimax schemes that bound it from above.

use rand::Rng;
use serde::Serialize;

use crate::combinatorial;
use crate::error::{check_arity, Error, Result};
use crate::spectral::{self, SensitivityGraph};
use crate::truth_table::TruthTable;

/// Largest arity for explicit per-input weight tables.
pub const SCHEME_CAP: usize = 16;

/// Symmetric weights on the edges of `G_f`, stored as `w(x, x⊕eᵢ)` at
/// index `x·n + i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeWeightScheme {
    pub n: usize,
    pub weights: Vec<f64>,
}

impl EdgeWeightScheme {
    pub fn weight(&self, x: usize, i: usize) -> f64 {
        self.weights[x * self.n + i]
    }

    /// `wt(x) = Σ_y w(x,y)`.
    pub fn weighted_degree(&self, x: usize) -> f64 {
        self.weights[x * self.n..(x + 1) * self.n].iter().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        let len = self.weights.len() / self.n.max(1);
        (0..len).all(|x| (0..self.n).all(|i| self.weight(x, i) == self.weight(x ^ 1 << i, i)))
    }

    /// Nonnegative, and zero off the edges of `G_f`.
    pub fn supported_on(&self, f: &TruthTable) -> bool {
        (0..f.len()).all(|x| {
            (0..self.n).all(|i| {
                let w = self.weight(x, i);
                w >= 0.0 && (w == 0.0 || f.is_sensitive(x, i))
            })
        })
    }

    /// `min √(wt(x)·wt(y))/w(x,y)` over weighted edges.
    pub fn value(&self) -> Option<f64> {
        let len = self.weights.len() / self.n.max(1);
        let mut best: Option<f64> = None;
        for x in 0..len {
            for i in 0..self.n {
                let w = self.weight(x, i);
                if w > 0.0 {
                    let r = (self.weighted_degree(x) * self.weighted_degree(x ^ 1 << i)).sqrt() / w;
                    best = Some(best.map_or(r, |b| b.min(r)));
                }
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Swa1Witness {
    pub scheme: EdgeWeightScheme,
    pub value: f64,
    pub lambda: f64,
}

/// `w(x,y) = v[x]·v[y]` on the edges of `G_f` for the principal vector `v`.
pub fn swa1_witness(f: &TruthTable) -> Result<Swa1Witness> {
    let n = f.arity();
    check_arity("weight schemes", n, SCHEME_CAP)?;
    if f.is_constant() {
        return Err(Error::EmptySupport);
    }
    let spec = spectral::lambda(f)?;
    let v: Vec<f64> = spec.principal_vector.iter().map(|a| a.abs()).collect();
    let g = SensitivityGraph::new(f);
    let mut weights = vec![0.0; f.len() * n];
    for x in 0..f.len() {
        for i in 0..n {
            if g.neighbor_mask(x) >> i & 1 == 1 {
                weights[x * n + i] = v[x] * v[x ^ 1 << i];
            }
        }
    }
    let scheme = EdgeWeightScheme { n, weights };
    let value = scheme.value().ok_or(Error::EmptySupport)?;
    Ok(Swa1Witness {
        scheme,
        value,
        lambda: spec.lambda,
    })
}

/// Nonnegative weights `w(x,i)` at index `x·n + i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimaxWeightScheme {
    pub n: usize,
    pub weights: Vec<f64>,
}

impl MinimaxWeightScheme {
    pub fn zeros(n: usize) -> Self {
        MinimaxWeightScheme {
            n,
            weights: vec![0.0; n << n],
        }
    }

    pub fn weight(&self, x: usize, i: usize) -> f64 {
        self.weights[x * self.n + i]
    }

    pub fn set(&mut self, x: usize, i: usize, w: f64) {
        self.weights[x * self.n + i] = w;
    }

    /// `max_x Σ_i w(x,i)`.
    pub fn objective(&self) -> f64 {
        self.weights
            .chunks(self.n.max(1))
            .map(|c| c.iter().sum::<f64>())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mm1Report {
    pub objective: f64,
    pub lambda: f64,
    /// `objective ≥ λ(f) − 1e−6`.
    pub weak_duality: bool,
}

/// Checks feasibility (`w(x,i)·w(x⊕eᵢ,i) ≥ 1` on sensitive pairs) and
/// compares the objective with `λ(f)`.
pub fn mm1_verify(f: &TruthTable, w: &MinimaxWeightScheme) -> Result<Mm1Report> {
    let objective = mm1_objective(f, w)?;
    let lambda = spectral::lambda(f)?.lambda;
    Ok(Mm1Report {
        objective,
        lambda,
        weak_duality: objective >= lambda - 1e-6,
    })
}

/// Feasibility check alone; returns the objective.
pub fn mm1_objective(f: &TruthTable, w: &MinimaxWeightScheme) -> Result<f64> {
    let n = f.arity();
    if w.n != n || w.weights.len() != f.len() * n {
        return Err(Error::Dimension(format!(
            "scheme for n = {} with {} weights, function of arity {n}",
            w.n,
            w.weights.len()
        )));
    }
    if let Some(p) = w.weights.iter().position(|&v| v.is_nan() || v < 0.0) {
        return Err(Error::Precondition(format!(
            "weight w({}, {}) = {} is not nonnegative",
            p / n.max(1),
            p % n.max(1) + 1,
            w.weights[p]
        )));
    }
    for x in 0..f.len() {
        for i in 0..n {
            let product = w.weight(x, i) * w.weight(x ^ 1 << i, i);
            if f.is_sensitive(x, i) && product < 1.0 - 1e-12 {
                return Err(Error::InfeasibleScheme {
                    input: x,
                    bit: i + 1,
                    product,
                });
            }
        }
    }
    Ok(w.objective())
}

/// `w(x,i) = √(s₀/s₁)` if `f(x) = 1` and `√(s₁/s₀)` if `f(x) = 0`, on
/// sensitive pairs only; objective at most `√(s₀s₁)`.
pub fn sqrt_s0s1_scheme(f: &TruthTable) -> Result<MinimaxWeightScheme> {
    let n = f.arity();
    check_arity("weight schemes", n, SCHEME_CAP)?;
    if f.is_constant() {
        return Err(Error::EmptySupport);
    }
    let s = combinatorial::sensitivity(f);
    let (s0, s1) = (s.on_zero as f64, s.on_one as f64);
    let mut w = MinimaxWeightScheme::zeros(n);
    for x in 0..f.len() {
        let value = if f.get(x) {
            (s0 / s1).sqrt()
        } else {
            (s1 / s0).sqrt()
        };
        for i in 0..n {
            if f.is_sensitive(x, i) {
                w.set(x, i, value);
            }
        }
    }
    Ok(w)
}

/// Weight 1 on every sensitive pair.
pub fn uniform_sensitive_scheme(f: &TruthTable) -> Result<MinimaxWeightScheme> {
    let n = f.arity();
    check_arity("weight schemes", n, SCHEME_CAP)?;
    let mut w = MinimaxWeightScheme::zeros(n);
    for x in 0..f.len() {
        for i in 0..n {
            if f.is_sensitive(x, i) {
                w.set(x, i, 1.0);
            }
        }
    }
    Ok(w)
}

/// A random feasible scheme: each sensitive pair gets `w(x,i)` uniform in
/// `[0.1, 4)` and `w(y,i) = s/w(x,i)` with `s` uniform in `[1, 2)`; other
/// pairs get uniform `[0, 1)` weights.
pub fn random_feasible_scheme<R: Rng + ?Sized>(
    f: &TruthTable,
    rng: &mut R,
) -> Result<MinimaxWeightScheme> {
    let n = f.arity();
    check_arity("weight schemes", n, SCHEME_CAP)?;
    let mut w = MinimaxWeightScheme::zeros(n);
    for x in 0..f.len() {
        for i in 0..n {
            let y = x ^ 1 << i;
            if y < x {
                continue;
            }
            if f.is_sensitive(x, i) {
                let a: f64 = rng.random_range(0.1..4.0);
                let s: f64 = rng.random_range(1.0..2.0);
                w.set(x, i, a);
                w.set(y, i, s / a);
            } else {
                w.set(x, i, rng.random_range(0.0..1.0));
                w.set(y, i, rng.random_range(0.0..1.0));
            }
        }
    }
    Ok(w)
}

/// `w(x,(i,j)) = w_f(g(x),i)·w_g(x⁽ⁱ⁾,j)` on `f∘g`; bit `(i,j)` is `i·m + j`.
pub fn compose_schemes(
    f: &TruthTable,
    g: &TruthTable,
    wf: &MinimaxWeightScheme,
    wg: &MinimaxWeightScheme,
) -> Result<MinimaxWeightScheme> {
    let (n, m) = (f.arity(), g.arity());
    if wf.n != n || wg.n != m {
        return Err(Error::Dimension(
            "scheme arities do not match the functions".into(),
        ));
    }
    check_arity("weight schemes", n * m, SCHEME_CAP)?;
    let block = (1usize << m) - 1;
    let mut w = MinimaxWeightScheme::zeros(n * m);
    for x in 0..1usize << (n * m) {
        let z = (0..n).fold(0, |acc, i| {
            acc | (g.bit(x >> (i * m) & block) as usize) << i
        });
        for i in 0..n {
            let xi = x >> (i * m) & block;
            for j in 0..m {
                w.set(x, i * m + j, wf.weight(z, i) * wg.weight(xi, j));
            }
        }
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompositionReport {
    pub lambda_f: f64,
    pub lambda_g: f64,
    pub lambda_composed: f64,
    /// `αᵀA_{f∘g}α` for the composed vector.
    pub rayleigh: f64,
    pub alpha_norm: f64,
    pub holds: bool,
}

/// Compares `λ(f∘g)` with `λ(f)·λ(g)` and builds the composed vector
/// `α[x] = 2^{n/2}·v[g(x)]·Π u[x⁽ⁱ⁾]` as a lower-bound witness.
pub fn composition_check(f: &TruthTable, g: &TruthTable) -> Result<CompositionReport> {
    let (n, m) = (f.arity(), g.arity());
    check_arity("composition checks", n * m, SCHEME_CAP)?;
    if f.is_constant() || g.is_constant() {
        return Err(Error::Precondition(
            "composition checks need non-constant f and g".into(),
        ));
    }
    let sf = spectral::lambda(f)?;
    let sg = spectral::lambda(g)?;
    let h = f.compose(g)?;
    let lambda_composed = spectral::lambda(&h)?.lambda;

    let v: Vec<f64> = sf.principal_vector.iter().map(|a| a.abs()).collect();
    let u: Vec<f64> = sg.principal_vector.iter().map(|a| a.abs()).collect();
    let block = (1usize << m) - 1;
    let scale = 2f64.powf(n as f64 / 2.0);
    let alpha: Vec<f64> = (0..h.len())
        .map(|x| {
            let mut z = 0;
            let mut prod = scale;
            for i in 0..n {
                let xi = x >> (i * m) & block;
                z |= (g.bit(xi) as usize) << i;
                prod *= u[xi];
            }
            prod * v[z]
        })
        .collect();
    let graph = SensitivityGraph::new(&h);
    let mut a_alpha = vec![0.0; alpha.len()];
    graph.apply(&alpha, &mut a_alpha);
    let rayleigh: f64 = alpha.iter().zip(&a_alpha).map(|(a, b)| a * b).sum();
    let alpha_norm = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();

    let product = sf.lambda * sg.lambda;
    Ok(CompositionReport {
        lambda_f: sf.lambda,
        lambda_g: sg.lambda,
        lambda_composed,
        rayleigh,
        alpha_norm,
        holds: (lambda_composed - product).abs() <= 1e-6
            && (alpha_norm - 1.0).abs() <= 1e-9
            && rayleigh >= product - 1e-6,
    })
}
