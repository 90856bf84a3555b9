//! Graph properties as Boolean functions of the `C(v,2)` edge variables.
//!
//! Vertices are numbered `1..=v`. Edge `{i,j}` with `i < j` is at position
//! `Σ_{k<i}(v−k) + (j−i)` (1-based), i.e. bit `position − 1` of the input.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::combinatorial::{self, QueryComplexity};
use crate::error::{check_arity, Error, Result};
use crate::poly;
use crate::spectral;
use crate::truth_table::TruthTable;

/// Largest vertex count (10 edge variables).
pub const VERTEX_CAP: usize = 5;
/// Largest vertex count for `bs`, `C` and `D` in reports.
pub const QUERY_VERTEX_CAP: usize = 4;

/// `(name, monotone)` for every built-in property.
pub const PROPERTIES: &[(&str, bool)] = &[
    ("edge", true),
    ("triangle", true),
    ("connected", true),
    ("min-degree-1", true),
    ("spanning-star", true),
    ("edge-parity", false),
    ("empty", false),
];

/// 0-based bit of edge `{i,j}` for 1-based vertices `i ≠ j`.
pub fn edge_index(v: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    assert!(
        1 <= i && j <= v && i != j,
        "edge {{{i},{j}}} out of range for {v} vertices"
    );
    (1..i).map(|k| v - k).sum::<usize>() + (j - i) - 1
}

/// 1-based endpoints of every edge, in bit order.
pub fn edge_list(v: usize) -> Vec<(usize, usize)> {
    (1..=v)
        .flat_map(|i| (i + 1..=v).map(move |j| (i, j)))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphProperty {
    pub name: String,
    pub vertices: usize,
    pub table: TruthTable,
}

struct Graph {
    v: usize,
    adj: Vec<u32>,
}

impl Graph {
    fn from_input(v: usize, edges: &[(usize, usize)], x: usize) -> Self {
        let mut adj = vec![0u32; v];
        for (k, &(i, j)) in edges.iter().enumerate() {
            if x >> k & 1 == 1 {
                adj[i - 1] |= 1 << (j - 1);
                adj[j - 1] |= 1 << (i - 1);
            }
        }
        Graph { v, adj }
    }

    fn has_triangle(&self) -> bool {
        (0..self.v).any(|a| {
            (a + 1..self.v).any(|b| self.adj[a] >> b & 1 == 1 && self.adj[a] & self.adj[b] != 0)
        })
    }

    fn connected(&self) -> bool {
        let all = (1u32 << self.v) - 1;
        let mut seen = 1u32;
        let mut frontier = 1u32;
        while frontier != 0 {
            let next = (0..self.v)
                .filter(|&a| frontier >> a & 1 == 1)
                .fold(0, |m, a| m | self.adj[a]);
            frontier = next & !seen;
            seen |= next;
        }
        seen & all == all
    }
}

impl GraphProperty {
    pub fn builtin(name: &str, vertices: usize) -> Result<Self> {
        if !PROPERTIES.iter().any(|(p, _)| *p == name) {
            return Err(Error::UnknownProperty(name.to_string()));
        }
        if vertices < 2 {
            return Err(Error::Precondition(
                "graph properties need at least 2 vertices".into(),
            ));
        }
        check_arity("graph properties (vertices)", vertices, VERTEX_CAP)?;
        let v = vertices;
        let edges = edge_list(v);
        let table = TruthTable::from_fn(edges.len(), |x| {
            let g = Graph::from_input(v, &edges, x);
            let full = (1u32 << v) - 1;
            match name {
                "edge" => x != 0,
                "triangle" => g.has_triangle(),
                "connected" => g.connected(),
                "min-degree-1" => g.adj.iter().all(|&a| a != 0),
                "spanning-star" => g
                    .adj
                    .iter()
                    .enumerate()
                    .any(|(a, &m)| m == full & !(1 << a)),
                "edge-parity" => x.count_ones() % 2 == 1,
                _ => false,
            }
        })?;
        Ok(GraphProperty {
            name: name.to_string(),
            vertices,
            table,
        })
    }

    /// The table after relabelling vertex `k` as `perm[k−1]` (1-based).
    pub fn permuted(&self, perm: &[usize]) -> TruthTable {
        let v = self.vertices;
        assert_eq!(perm.len(), v);
        let edges = edge_list(v);
        let target: Vec<usize> = edges
            .iter()
            .map(|&(i, j)| edge_index(v, perm[i - 1], perm[j - 1]))
            .collect();
        TruthTable::from_fn(edges.len(), |x| {
            let y = (0..edges.len())
                .filter(|&k| x >> k & 1 == 1)
                .fold(0usize, |y, k| y | 1 << target[k]);
            self.table.get(y)
        })
        .expect("same arity")
    }

    pub fn invariant_under(&self, perm: &[usize]) -> bool {
        self.permuted(perm) == self.table
    }
}

/// `x ≤ y ⟹ f(x) ≤ f(y)`, checked on every comparable pair at distance 1.
pub fn is_monotone(f: &TruthTable) -> bool {
    (0..f.len()).all(|x| (0..f.arity()).all(|i| x >> i & 1 == 1 || f.get(x) <= f.get(x | 1 << i)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyFlags {
    pub invariant: bool,
    pub monotone: bool,
    pub nontrivial: bool,
}

/// Invariance under the generators `(1 2)` and `(1 2 … v)` of `S_v`,
/// monotonicity, and nonconstancy.
pub fn check_graph_property(p: &GraphProperty) -> PropertyFlags {
    let v = p.vertices;
    let mut swap: Vec<usize> = (1..=v).collect();
    swap.swap(0, 1);
    let cycle: Vec<usize> = (1..=v).map(|k| k % v + 1).collect();
    PropertyFlags {
        invariant: p.invariant_under(&swap) && p.invariant_under(&cycle),
        monotone: is_monotone(&p.table),
        nontrivial: !p.table.is_constant(),
    }
}

/// Invariance under `count` uniformly random vertex permutations.
pub fn random_invariance<R: Rng + ?Sized>(p: &GraphProperty, count: usize, rng: &mut R) -> bool {
    let mut perm: Vec<usize> = (1..=p.vertices).collect();
    (0..count).all(|_| {
        perm.shuffle(rng);
        p.invariant_under(&perm)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphPropertyReport {
    pub name: String,
    pub vertices: usize,
    pub edge_variables: usize,
    pub flags: PropertyFlags,
    pub deg2: usize,
    pub deg: usize,
    pub lambda: f64,
    pub s: usize,
    pub bs: Option<usize>,
    pub c: Option<usize>,
    pub d: Option<usize>,
    /// `√deg₂`, a lower bound on `λ` through `λ ≥ √deg ≥ √deg₂`.
    pub sqrt_deg2: f64,
}

pub fn graph_property_report(p: &GraphProperty) -> Result<GraphPropertyReport> {
    let f = &p.table;
    let small = p.vertices <= QUERY_VERTEX_CAP;
    let deg2 = poly::degree_gf2(f);
    Ok(GraphPropertyReport {
        name: p.name.clone(),
        vertices: p.vertices,
        edge_variables: f.arity(),
        flags: check_graph_property(p),
        deg2,
        deg: poly::degree(f),
        lambda: spectral::lambda(f)?.lambda,
        s: combinatorial::sensitivity(f).max(),
        bs: small
            .then(|| combinatorial::block_sensitivity(f))
            .transpose()?
            .map(|b| b.max()),
        c: small
            .then(|| combinatorial::certificate_complexity(f))
            .transpose()?
            .map(|c| c.max()),
        d: small.then(|| QueryComplexity::new().depth(f)).transpose()?,
        sqrt_deg2: (deg2 as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::from_family;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn edge_layout() {
        assert_eq!(
            edge_list(4),
            vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
        );
        for v in 2..=6 {
            for (k, &(i, j)) in edge_list(v).iter().enumerate() {
                assert_eq!(edge_index(v, i, j), k);
                assert_eq!(edge_index(v, j, i), k);
            }
        }
    }

    #[test]
    fn flag_examples() {
        let p = GraphProperty::builtin("edge", 4).unwrap();
        assert_eq!(p.table, from_family("or", &[6]).unwrap());
        let all = PropertyFlags {
            invariant: true,
            monotone: true,
            nontrivial: true,
        };
        assert_eq!(check_graph_property(&p), all);
        assert_eq!(
            check_graph_property(&GraphProperty::builtin("connected", 4).unwrap()),
            all
        );
        let f = check_graph_property(&GraphProperty::builtin("edge-parity", 4).unwrap());
        assert!(f.invariant && f.nontrivial && !f.monotone);
        let f = check_graph_property(&GraphProperty::builtin("empty", 4).unwrap());
        assert!(f.invariant && !f.nontrivial);
    }

    #[test]
    fn properties_by_brute_force() {
        // labelled graphs on 4 vertices: 38 connected, 41 triangle-free
        let count = |name| GraphProperty::builtin(name, 4).unwrap().table.count_ones();
        assert_eq!(count("connected"), 38);
        assert_eq!(count("triangle"), 64 - 41);
        // spanning star on 3 vertices means a path or triangle
        assert_eq!(
            GraphProperty::builtin("spanning-star", 3)
                .unwrap()
                .table
                .count_ones(),
            4
        );
        assert_eq!(count("min-degree-1"), 41);
        assert!(GraphProperty::builtin("clique", 4).is_err());
        assert!(GraphProperty::builtin("edge", 6).is_err());
    }

    #[test]
    fn non_invariant_function_detected() {
        let mut p = GraphProperty::builtin("edge", 4).unwrap();
        p.table = from_family("id", &[6]).unwrap();
        assert!(!check_graph_property(&p).invariant);
    }

    #[test]
    fn builtins_random_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for v in 3..=4 {
            for (name, monotone) in PROPERTIES {
                let p = GraphProperty::builtin(name, v).unwrap();
                assert!(random_invariance(&p, 50, &mut rng), "{name} {v}");
                let flags = check_graph_property(&p);
                assert!(flags.invariant);
                assert_eq!(flags.monotone, *monotone || p.table.is_constant(), "{name}");
            }
        }
    }

    #[test]
    fn report_examples() {
        let r = graph_property_report(&GraphProperty::builtin("edge", 3).unwrap()).unwrap();
        assert_eq!(r.deg2, 3);
        assert!((r.lambda - 3f64.sqrt()).abs() < 1e-9);
        assert_eq!((r.bs, r.c, r.d), (Some(3), Some(3), Some(3)));
        let r = graph_property_report(&GraphProperty::builtin("triangle", 4).unwrap()).unwrap();
        assert!(r.deg2 <= r.deg);
        let r = graph_property_report(&GraphProperty::builtin("empty", 4).unwrap()).unwrap();
        assert!(!r.flags.nontrivial);
        assert_eq!((r.deg2, r.deg, r.s, r.bs, r.d), (0, 0, 0, Some(0), Some(0)));
        assert_eq!(r.lambda, 0.0);
        let r = graph_property_report(&GraphProperty::builtin("connected", 5).unwrap()).unwrap();
        assert_eq!((r.bs, r.c, r.d), (None, None, None));
    }

    #[test]
    fn monotone_chain() {
        for v in 3..=4 {
            for (name, monotone) in PROPERTIES {
                if !monotone {
                    continue;
                }
                let r = graph_property_report(&GraphProperty::builtin(name, v).unwrap()).unwrap();
                let l2 = r.lambda * r.lambda;
                assert!(
                    l2 >= r.deg as f64 - 1e-6 && r.deg >= r.deg2,
                    "{name} {v}: {r:?}"
                );
            }
        }
    }
}
