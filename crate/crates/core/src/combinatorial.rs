//! Sensitivity, block sensitivity, certificate complexity and exact
//! deterministic query complexity.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{check_arity, Result};
use crate::poly;
use crate::truth_table::TruthTable;

/// Arity cap for the exact block-sensitivity and certificate searches.
pub const BS_CAP: usize = 6;
/// Arity cap for the decision-tree recursion.
pub const D_CAP: usize = 6;

/// A per-input measure with its maxima over `f⁻¹(0)` and `f⁻¹(1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub per_input: Vec<u8>,
    pub on_zero: usize,
    pub on_one: usize,
}

impl Profile {
    fn collect(f: &TruthTable, per_input: Vec<u8>) -> Self {
        let (mut on_zero, mut on_one) = (0, 0);
        for (x, &v) in per_input.iter().enumerate() {
            let slot = if f.get(x) { &mut on_one } else { &mut on_zero };
            *slot = (*slot).max(v as usize);
        }
        Profile {
            per_input,
            on_zero,
            on_one,
        }
    }

    pub fn max(&self) -> usize {
        self.on_zero.max(self.on_one)
    }

    pub fn at(&self, x: usize) -> usize {
        self.per_input[x] as usize
    }
}

/// `s_x`, `bs_x` and `C_x` for every input, with the usual aggregates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointMeasures {
    pub sensitivity: Profile,
    pub block_sensitivity: Profile,
    pub certificate: Profile,
}

impl PointMeasures {
    pub fn s(&self) -> usize {
        self.sensitivity.max()
    }

    pub fn bs(&self) -> usize {
        self.block_sensitivity.max()
    }

    pub fn c(&self) -> usize {
        self.certificate.max()
    }
}

pub fn sensitivity(f: &TruthTable) -> Profile {
    let n = f.arity();
    let per_input = (0..f.len())
        .map(|x| (0..n).filter(|&i| f.is_sensitive(x, i)).count() as u8)
        .collect();
    Profile::collect(f, per_input)
}

/// `E_x[s_x(f)]`.
pub fn average_sensitivity(f: &TruthTable) -> f64 {
    let n = f.arity();
    let total: usize = (0..f.len())
        .map(|x| (0..n).filter(|&i| f.is_sensitive(x, i)).count())
        .sum();
    total as f64 / f.len() as f64
}

/// Exact block sensitivity at every input.
pub fn block_sensitivity(f: &TruthTable) -> Result<Profile> {
    check_arity("block sensitivity", f.arity(), BS_CAP)?;
    let mut scratch = Scratch::new(f.arity());
    let per_input = (0..f.len())
        .map(|x| {
            scratch.minimal_blocks(f, x);
            scratch.max_packing() as u8
        })
        .collect();
    Ok(Profile::collect(f, per_input))
}

/// Exact certificate complexity at every input.
pub fn certificate_complexity(f: &TruthTable) -> Result<Profile> {
    check_arity("certificate complexity", f.arity(), BS_CAP)?;
    let mut scratch = Scratch::new(f.arity());
    let per_input = (0..f.len())
        .map(|x| {
            scratch.minimal_blocks(f, x);
            scratch.min_hitting_set() as u8
        })
        .collect();
    Ok(Profile::collect(f, per_input))
}

/// All three point measures, sharing the minimal-block enumeration.
pub fn point_measures(f: &TruthTable) -> Result<PointMeasures> {
    check_arity("block sensitivity", f.arity(), BS_CAP)?;
    let mut scratch = Scratch::new(f.arity());
    let mut bs = Vec::with_capacity(f.len());
    let mut c = Vec::with_capacity(f.len());
    for x in 0..f.len() {
        scratch.minimal_blocks(f, x);
        bs.push(scratch.max_packing() as u8);
        c.push(scratch.min_hitting_set() as u8);
    }
    Ok(PointMeasures {
        sensitivity: sensitivity(f),
        block_sensitivity: Profile::collect(f, bs),
        certificate: Profile::collect(f, c),
    })
}

/// Reusable buffers for the per-input block searches.
struct Scratch {
    n: usize,
    sensitive_below: Vec<bool>,
    blocks: Vec<u32>,
    packing_memo: Vec<i8>,
    by_weight: Vec<u32>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        let mut by_weight: Vec<u32> = (0..1u32 << n).collect();
        by_weight.sort_by_key(|m| (m.count_ones(), *m));
        Scratch {
            n,
            sensitive_below: vec![false; 1 << n],
            blocks: Vec::new(),
            packing_memo: vec![-1; 1 << n],
            by_weight,
        }
    }

    /// Fills `blocks` with the minimal sensitive blocks of `x`: blocks `B`
    /// with `f(x ⊕ B) ≠ f(x)` none of whose proper subsets are sensitive.
    fn minimal_blocks(&mut self, f: &TruthTable, x: usize) {
        let fx = f.get(x);
        let len = 1usize << self.n;
        self.blocks.clear();
        for b in 0..len {
            self.sensitive_below[b] = b != 0 && f.get(x ^ b) != fx;
        }
        // Visit blocks by increasing weight; a block is minimal when it is
        // sensitive and no block one element smaller has a sensitive subset.
        for &b in &self.by_weight[1..] {
            let b = b as usize;
            let below = (0..self.n)
                .filter(|i| b >> i & 1 == 1)
                .any(|i| self.sensitive_below[b & !(1 << i)]);
            if self.sensitive_below[b] && !below {
                self.blocks.push(b as u32);
            }
            self.sensitive_below[b] |= below;
        }
    }

    fn max_packing(&mut self) -> usize {
        self.packing_memo.iter_mut().for_each(|m| *m = -1);
        let full = (1u32 << self.n) - 1;
        Self::pack(full, &self.blocks, &mut self.packing_memo) as usize
    }

    /// Maximum number of disjoint blocks inside `free`: either the lowest
    /// free element stays unused, or some block containing it is taken.
    fn pack(free: u32, blocks: &[u32], memo: &mut [i8]) -> i8 {
        if free == 0 {
            return 0;
        }
        if memo[free as usize] >= 0 {
            return memo[free as usize];
        }
        let low = free & free.wrapping_neg();
        let mut best = Self::pack(free & !low, blocks, memo);
        for &b in blocks {
            if b & low != 0 && b & !free == 0 {
                best = best.max(1 + Self::pack(free & !b, blocks, memo));
            }
        }
        memo[free as usize] = best;
        best
    }

    /// Smallest set of positions meeting every minimal sensitive block:
    /// fixing those positions of `x` forces the value of `f`.
    fn min_hitting_set(&self) -> usize {
        self.by_weight
            .iter()
            .find(|&&s| self.blocks.iter().all(|b| b & s != 0))
            .map(|s| s.count_ones() as usize)
            .expect("the full set meets every block")
    }
}

/// Memoized minimax recursion for the decision-tree depth `D(f)`.
///
/// The memo is keyed by the raw packed table of the restricted subfunction
/// and may be reused across many functions by the same worker.
#[derive(Default)]
pub struct QueryComplexity {
    memo: HashMap<(u8, u64), u8>,
}

impl QueryComplexity {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn depth(&mut self, f: &TruthTable) -> Result<usize> {
        check_arity("deterministic query complexity", f.arity(), D_CAP)?;
        let bits = f.as_u64().expect("arity within cap");
        Ok(self.solve(f.arity(), bits) as usize)
    }

    /// The variable an optimal tree queries first (lowest index among ties),
    /// or `None` for constants.
    pub fn first_query(&mut self, f: &TruthTable) -> Result<Option<usize>> {
        let depth = self.depth(f)?;
        if depth == 0 {
            return Ok(None);
        }
        let (k, bits) = (f.arity(), f.as_u64().unwrap());
        Ok((0..k).find(|&i| {
            let d0 = self.solve(k - 1, restrict_word(bits, k, i, false));
            let d1 = self.solve(k - 1, restrict_word(bits, k, i, true));
            1 + d0.max(d1) as usize == depth
        }))
    }

    fn solve(&mut self, k: usize, bits: u64) -> u8 {
        let len = 1u32 << k;
        let full = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        if bits == 0 || bits == full {
            return 0;
        }
        if let Some(&d) = self.memo.get(&(k as u8, bits)) {
            return d;
        }
        let mut best = u8::MAX;
        for i in 0..k {
            let d0 = self.solve(k - 1, restrict_word(bits, k, i, false));
            if d0 + 1 >= best {
                continue;
            }
            let d1 = self.solve(k - 1, restrict_word(bits, k, i, true));
            best = best.min(1 + d0.max(d1));
        }
        self.memo.insert((k as u8, bits), best);
        best
    }
}

/// Fixes variable `i` of a packed `k`-variable table to `value`.
fn restrict_word(bits: u64, k: usize, i: usize, value: bool) -> u64 {
    let mut out = 0u64;
    let low = (1usize << i) - 1;
    for y in 0..1usize << (k - 1) {
        let x = (y & low) | ((y & !low) << 1) | (value as usize) << i;
        out |= (bits >> x & 1) << y;
    }
    out
}

/// Exact `D(f)` for `n ≤ 6`.
pub fn det_query_complexity(f: &TruthTable) -> Result<usize> {
    QueryComplexity::new().depth(f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MidrijanisReport {
    pub d: usize,
    pub bs: usize,
    pub deg: usize,
    pub holds: bool,
}

/// Checks `D(f) ≤ bs(f)·deg(f)`.
pub fn check_midrijanis(f: &TruthTable) -> Result<MidrijanisReport> {
    let d = det_query_complexity(f)?;
    let bs = block_sensitivity(f)?.max();
    let deg = poly::degree(f);
    Ok(MidrijanisReport {
        d,
        bs,
        deg,
        holds: d <= bs * deg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::from_family;
    use crate::truth_table::all_functions;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fam(name: &str, p: &[usize]) -> TruthTable {
        from_family(name, p).unwrap()
    }

    /// Oracle: block sensitivity at `x` by trying every family of pairwise
    /// disjoint sensitive blocks (all blocks, not only minimal ones).
    fn brute_bs(f: &TruthTable, x: usize) -> usize {
        let blocks: Vec<usize> = (1..f.len()).filter(|&b| f.get(x ^ b) != f.get(x)).collect();
        fn go(blocks: &[usize], used: usize) -> usize {
            match blocks.split_first() {
                None => 0,
                Some((&b, rest)) => {
                    let skip = go(rest, used);
                    if b & used == 0 {
                        skip.max(1 + go(rest, used | b))
                    } else {
                        skip
                    }
                }
            }
        }
        go(&blocks, 0)
    }

    /// Oracle: certificate size at `x` straight from the definition.
    fn brute_c(f: &TruthTable, x: usize) -> usize {
        let full = f.len() - 1;
        (0..f.len())
            .filter(|&s| {
                let free = full & !s;
                (0..f.len())
                    .filter(|z| z & !free == 0)
                    .all(|z| f.get(x ^ z) == f.get(x))
            })
            .map(|s| s.count_ones() as usize)
            .min()
            .unwrap()
    }

    /// Oracle: decision-tree depth by plain recursion over restrictions.
    fn brute_d(f: &TruthTable) -> usize {
        if f.is_constant() {
            return 0;
        }
        (0..f.arity())
            .map(|i| {
                let a = brute_d(&f.restrict(&[(i, false)]).unwrap());
                let b = brute_d(&f.restrict(&[(i, true)]).unwrap());
                1 + a.max(b)
            })
            .min()
            .unwrap()
    }

    #[test]
    fn sensitivity_examples() {
        for n in 1..=6 {
            let s = sensitivity(&fam("or", &[n]));
            assert_eq!((s.on_zero, s.on_one, s.max()), (n, 1, n));
            let s = sensitivity(&fam("xor-or", &[n]));
            assert_eq!((s.on_zero, s.on_one), (n, n));
        }
        let s = sensitivity(&fam("const0", &[3]));
        assert_eq!(s.max(), 0);
        assert_eq!(average_sensitivity(&fam("parity", &[5])), 5.0);
        assert_eq!(average_sensitivity(&fam("or", &[2])), 1.0);
    }

    #[test]
    fn block_sensitivity_examples() {
        assert_eq!(block_sensitivity(&fam("or", &[2])).unwrap().at(0), 2);
        for n in 1..=6 {
            assert_eq!(block_sensitivity(&fam("parity", &[n])).unwrap().max(), n);
        }
        let and_or = fam("and-or", &[2, 2]);
        assert_eq!(
            block_sensitivity(&and_or).unwrap().at(0),
            brute_bs(&and_or, 0)
        );
        assert_eq!(block_sensitivity(&and_or).unwrap().at(0), 2);
        assert!(block_sensitivity(&fam("or", &[7])).is_err());
    }

    #[test]
    fn certificate_examples() {
        let c = certificate_complexity(&fam("or", &[2])).unwrap();
        assert_eq!((c.on_zero, c.on_one, c.max()), (2, 1, 2));
        for n in 1..=5 {
            assert_eq!(
                certificate_complexity(&fam("parity", &[n])).unwrap().max(),
                n
            );
        }
        let and_or = fam("and-or", &[2, 2]);
        let c = certificate_complexity(&and_or).unwrap();
        let brute: Vec<usize> = (0..16).map(|x| brute_c(&and_or, x)).collect();
        assert_eq!(
            c.per_input.iter().map(|&v| v as usize).collect::<Vec<_>>(),
            brute
        );
        // e.g. x = 0011: block 1 true, block 2 false; the zero certificate
        // fixes x3=x4=0, and the one-inputs need one true bit per block.
        assert_eq!(brute.iter().max(), Some(&2));
        assert_eq!(c.max(), 2);
    }

    #[test]
    fn block_measures_match_oracles_exhaustively() {
        for n in 0..=3 {
            for f in all_functions(n).unwrap() {
                let pm = point_measures(&f).unwrap();
                for x in 0..f.len() {
                    assert_eq!(pm.block_sensitivity.at(x), brute_bs(&f, x), "{f} at {x}");
                    assert_eq!(pm.certificate.at(x), brute_c(&f, x), "{f} at {x}");
                }
            }
        }
    }

    #[test]
    fn block_measures_match_oracles_on_random_4_bit_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let f = TruthTable::from_u64(4, rng.random::<u64>()).unwrap();
            let pm = point_measures(&f).unwrap();
            for x in 0..16 {
                assert_eq!(pm.block_sensitivity.at(x), brute_bs(&f, x));
                assert_eq!(pm.certificate.at(x), brute_c(&f, x));
            }
        }
    }

    #[test]
    fn query_complexity_examples() {
        for n in 1..=5 {
            assert_eq!(det_query_complexity(&fam("parity", &[n])).unwrap(), n);
            assert_eq!(det_query_complexity(&fam("or", &[n])).unwrap(), n);
        }
        assert_eq!(det_query_complexity(&fam("and-or", &[2, 2])).unwrap(), 4);
        assert_eq!(det_query_complexity(&fam("const1", &[4])).unwrap(), 0);
        assert_eq!(det_query_complexity(&fam("id", &[4])).unwrap(), 1);
        assert!(det_query_complexity(&fam("or", &[7])).is_err());
        assert_eq!(det_query_complexity(&fam("or", &[6])).unwrap(), 6);
        let mut qc = QueryComplexity::new();
        assert_eq!(qc.first_query(&fam("id", &[3])).unwrap(), Some(0));
        assert_eq!(qc.first_query(&fam("const0", &[3])).unwrap(), None);
    }

    #[test]
    fn query_complexity_matches_plain_recursion() {
        let mut qc = QueryComplexity::new();
        for f in all_functions(3).unwrap() {
            assert_eq!(qc.depth(&f).unwrap(), brute_d(&f), "{f}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let f = TruthTable::from_u64(4, rng.random::<u64>()).unwrap();
            assert_eq!(qc.depth(&f).unwrap(), brute_d(&f), "{f}");
        }
    }

    #[test]
    fn query_complexity_is_invariant_under_relabeling_and_negation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut qc = QueryComplexity::new();
        for _ in 0..200 {
            let f = TruthTable::from_u64(5, rng.random::<u64>()).unwrap();
            let mut perm: Vec<usize> = (0..5).collect();
            perm.shuffle(&mut rng);
            let d = qc.depth(&f).unwrap();
            assert_eq!(qc.depth(&f.permute_vars(&perm).unwrap()).unwrap(), d);
            assert_eq!(qc.depth(&f.negate()).unwrap(), d);
            assert_eq!(
                qc.depth(&f.flip_inputs(rng.random_range(0..32))).unwrap(),
                d
            );
        }
    }

    #[test]
    fn midrijanis_examples() {
        let r = check_midrijanis(&fam("or", &[3])).unwrap();
        assert_eq!((r.d, r.bs, r.deg, r.holds), (3, 3, 3, true));
        let r = check_midrijanis(&fam("parity", &[4])).unwrap();
        assert_eq!((r.d, r.bs, r.deg, r.holds), (4, 4, 4, true));
        let r = check_midrijanis(&fam("const1", &[3])).unwrap();
        assert_eq!((r.d, r.bs, r.deg, r.holds), (0, 0, 0, true));
    }

    #[test]
    fn measure_chain_exhaustive_n4() {
        let mut qc = QueryComplexity::new();
        for n in 0..=4 {
            for f in all_functions(n).unwrap() {
                let pm = point_measures(&f).unwrap();
                let d = qc.depth(&f).unwrap();
                let deg = poly::degree(&f);
                let (s, bs, c) = (pm.s(), pm.bs(), pm.c());
                assert!(s <= bs && bs <= c && c <= d, "{f}");
                assert!(poly::degree_gf2(&f) <= deg && deg <= d, "{f}");
                assert!(d <= bs * deg, "{f}");
                assert!(c <= bs * s, "{f}");
                for x in 0..f.len() {
                    let (sx, bsx, cx) = (
                        pm.sensitivity.at(x),
                        pm.block_sensitivity.at(x),
                        pm.certificate.at(x),
                    );
                    assert!(sx <= bsx && bsx <= cx);
                }
            }
        }
    }
}
