//! Sensitivity graphs and spectral sensitivity.

mod huang;
mod identities;

pub use huang::{
    huang_witness, max_degree_subcube, signing_matrix, HuangWitness, Side, SigningMatrix,
};
pub use identities::{hadamard_identities, hadamard_identity_exact, rxr_minus_x, HadamardReport};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_arity, Error, Result};
use crate::linalg::{self, Matrix};
use crate::truth_table::TruthTable;

/// Largest arity for which a dense `2ⁿ×2ⁿ` matrix is materialized.
pub const DENSE_CAP: usize = 12;
/// Largest arity for which the explicit edge list is produced.
pub const EDGE_LIST_CAP: usize = 20;
/// Largest arity for the dense eigensolver reference path.
pub const DENSE_EIGEN_CAP: usize = 10;

/// The subgraph `G_f` of the hypercube keeping the edges along which `f`
/// changes value. Stored implicitly as one neighbor bitmask per vertex.
#[derive(Clone, Debug)]
pub struct SensitivityGraph {
    n: usize,
    masks: Vec<u32>,
}

impl SensitivityGraph {
    pub fn new(f: &TruthTable) -> Self {
        let n = f.arity();
        let masks = (0..f.len())
            .map(|x| {
                (0..n)
                    .filter(|&i| f.is_sensitive(x, i))
                    .fold(0u32, |m, i| m | 1 << i)
            })
            .collect();
        SensitivityGraph { n, masks }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        self.masks.len()
    }

    /// Bitmask of the directions along which `x` is sensitive.
    pub fn neighbor_mask(&self, x: usize) -> u32 {
        self.masks[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.masks[x].count_ones() as usize
    }

    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        let m = self.masks[x];
        (0..self.n)
            .filter(move |i| m >> i & 1 == 1)
            .map(move |i| x ^ 1 << i)
    }

    pub fn num_edges(&self) -> usize {
        self.masks
            .iter()
            .map(|m| m.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Edges `(x, y)` with `x < y`, ordered by `x` then direction.
    pub fn edges(&self) -> Result<Vec<(usize, usize)>> {
        check_arity("edge lists", self.n, EDGE_LIST_CAP)?;
        Ok((0..self.masks.len())
            .flat_map(|x| {
                self.neighbors(x)
                    .filter(move |&y| y > x)
                    .map(move |y| (x, y))
            })
            .collect())
    }

    pub fn dense(&self) -> Result<Matrix> {
        check_arity("dense matrices", self.n, DENSE_CAP)?;
        let len = self.masks.len();
        let mut a = DMatrix::zeros(len, len);
        for x in 0..len {
            for y in self.neighbors(x) {
                a[(x, y)] = 1.0;
            }
        }
        Ok(a)
    }

    /// `out ← A_f·v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (x, o) in out.iter_mut().enumerate() {
            *o = self.neighbors(x).map(|y| v[y]).sum();
        }
    }

    /// Connected components with at least one edge, each listed in
    /// increasing vertex order; components sorted by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let len = self.masks.len();
        let mut seen = vec![false; len];
        let mut out = Vec::new();
        for root in 0..len {
            if seen[root] || self.masks[root] == 0 {
                continue;
            }
            seen[root] = true;
            let mut comp = vec![root];
            let mut head = 0;
            while head < comp.len() {
                let x = comp[head];
                head += 1;
                for y in self.neighbors(x) {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            tolerance: 1e-10,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralResult {
    pub lambda: f64,
    pub principal_vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Spectral sensitivity `λ(f) = ‖A_f‖` by power iteration.
pub fn lambda(f: &TruthTable) -> Result<SpectralResult> {
    lambda_of_graph(&SensitivityGraph::new(f), PowerOptions::default())
}

/// Power iteration per connected component.
///
/// `A_f` is bipartite, so its spectrum is symmetric and plain power
/// iteration oscillates. Each component is iterated with `A²` restricted
/// to its even-weight side (a nonnegative matrix with positive diagonal);
/// the eigenvector `u` found there lifts to `v = (u + A·u/λ)/√2`.
pub fn lambda_of_graph(g: &SensitivityGraph, opts: PowerOptions) -> Result<SpectralResult> {
    let len = g.num_vertices();
    let mut best: Option<SpectralResult> = None;
    let mut local = vec![u32::MAX; len];
    for comp in g.components() {
        for (k, &x) in comp.iter().enumerate() {
            local[x] = k as u32;
        }
        let r = component_power(g, &comp, &local, opts)?;
        if best.as_ref().is_none_or(|b| r.lambda > b.lambda) {
            let mut v = vec![0.0; len];
            for (k, &x) in comp.iter().enumerate() {
                v[x] = r.principal_vector[k];
            }
            best = Some(SpectralResult {
                principal_vector: v,
                ..r
            });
        }
        for &x in &comp {
            local[x] = u32::MAX;
        }
    }
    Ok(best.unwrap_or_else(|| SpectralResult {
        lambda: 0.0,
        principal_vector: vec![(len as f64).sqrt().recip(); len],
        iterations: 0,
        residual: 0.0,
    }))
}

fn component_power(
    g: &SensitivityGraph,
    comp: &[usize],
    local: &[u32],
    opts: PowerOptions,
) -> Result<SpectralResult> {
    let apply = |v: &[f64], out: &mut [f64]| {
        for (k, &x) in comp.iter().enumerate() {
            out[k] = g.neighbors(x).map(|y| v[local[y] as usize]).sum();
        }
    };
    let even: Vec<bool> = comp.iter().map(|x| x.count_ones() % 2 == 0).collect();
    let size = comp.len();
    // positive start on the even side, lightly perturbed
    let mut u: Vec<f64> = comp
        .iter()
        .zip(&even)
        .map(|(&x, &e)| {
            if e {
                1.0 + 1e-3 * ((x.wrapping_mul(2_654_435_761) >> 7) % 1000) as f64 / 1000.0
            } else {
                0.0
            }
        })
        .collect();
    normalize(&mut u);
    let mut w = vec![0.0; size];
    let mut z = vec![0.0; size];
    let mut iterations = 0;
    loop {
        apply(&u, &mut w);
        let lam = norm(&w);
        apply(&w, &mut z);
        let lam2 = lam * lam;
        let res2: f64 = z.iter().zip(&u).map(|(a, b)| (a - lam2 * b).powi(2)).sum();
        let residual = res2.sqrt() / (lam * std::f64::consts::SQRT_2);
        iterations += 1;
        if residual <= opts.tolerance {
            let v = u
                .iter()
                .zip(&w)
                .map(|(a, b)| (a + b / lam) / std::f64::consts::SQRT_2)
                .collect();
            return Ok(SpectralResult {
                lambda: lam,
                principal_vector: v,
                iterations,
                residual,
            });
        }
        if iterations >= opts.max_iterations {
            return Err(Error::Numerical(format!(
                "power iteration did not converge after {iterations} steps (residual {residual:e})"
            )));
        }
        std::mem::swap(&mut u, &mut z);
        normalize(&mut u);
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) {
    let s = norm(v);
    v.iter_mut().for_each(|a| *a /= s);
}

/// `λ(f)` by a dense symmetric eigensolve; the reference path.
pub fn lambda_dense(f: &TruthTable) -> Result<f64> {
    check_arity("dense eigensolves", f.arity(), DENSE_EIGEN_CAP)?;
    let a = SensitivityGraph::new(f).dense()?;
    Ok(linalg::top_eigen(&a).0.max(0.0))
}

/// Largest singular value of the `f⁻¹(0) × f⁻¹(1)` block of `A_f`.
pub fn koutsoupias(f: &TruthTable) -> Result<f64> {
    check_arity("the Koutsoupias matrix", f.arity(), DENSE_EIGEN_CAP)?;
    let zeros: Vec<usize> = (0..f.len()).filter(|&x| !f.get(x)).collect();
    let ones: Vec<usize> = (0..f.len()).filter(|&x| f.get(x)).collect();
    if zeros.is_empty() || ones.is_empty() {
        return Ok(0.0);
    }
    let q = DMatrix::from_fn(zeros.len(), ones.len(), |r, c| {
        if (zeros[r] ^ ones[c]).count_ones() == 1 {
            1.0
        } else {
            0.0
        }
    });
    Ok(q.singular_values().max())
}

/// Checks that `A_f ∘ D_i` is a partial permutation matrix for every `i`,
/// where `D_i[x,y] = 1` iff `x` and `y` differ in bit `i`.
pub fn directions_are_partial_permutations(f: &TruthTable) -> bool {
    let g = SensitivityGraph::new(f);
    (0..f.arity()).all(|i| {
        (0..g.num_vertices()).all(|x| {
            let row: Vec<usize> = g.neighbors(x).filter(|y| (x ^ y) >> i & 1 == 1).collect();
            row.len() <= 1 && row.iter().all(|&y| y == x ^ 1 << i)
        })
    })
}
