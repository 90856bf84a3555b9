//! Packed truth tables of total Boolean functions.
//!
//! An input string `x = x_1 … x_n` is identified with the integer
//! `Σ x_i · 2^(i-1)`, so coordinate `x_1` is the least significant bit.
//! Throughout the crate variables are addressed by their zero-based bit
//! position: variable `i` is bit `i` of the index.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_arity, Error, Result};

/// Largest arity a table may have.
pub const MAX_ARITY: usize = 24;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    /// The constant function with value `value` on `n` bits.
    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Self::from_fn(n, |_| value)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        check_arity("truth tables", n, MAX_ARITY)?;
        let len = 1usize << n;
        let mut words = vec![0u64; len.div_ceil(64)];
        for x in 0..len {
            if f(x) {
                words[x >> 6] |= 1 << (x & 63);
            }
        }
        Ok(TruthTable { n, words })
    }

    /// Builds a table from its values listed in index order.
    pub fn from_values(n: usize, values: &[bool]) -> Result<Self> {
        check_arity("truth tables", n, MAX_ARITY)?;
        if values.len() != 1 << n {
            return Err(Error::Dimension(format!(
                "{} values supplied for arity {n} (expected {})",
                values.len(),
                1usize << n
            )));
        }
        Self::from_fn(n, |x| values[x])
    }

    /// Table on `n ≤ 6` bits whose value at `x` is bit `x` of `bits`.
    pub fn from_u64(n: usize, bits: u64) -> Result<Self> {
        check_arity("packed 64-bit tables", n, 6)?;
        let len = 1usize << n;
        let mask = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        Ok(TruthTable {
            n,
            words: vec![bits & mask],
        })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    /// Number of inputs, `2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, x: usize) -> bool {
        (self.words[x >> 6] >> (x & 63)) & 1 == 1
    }

    /// Value as 0/1.
    #[inline]
    pub fn bit(&self, x: usize) -> u8 {
        self.get(x) as u8
    }

    /// The whole table as one word, for `n ≤ 6`.
    pub fn as_u64(&self) -> Option<u64> {
        (self.n <= 6).then(|| self.words[0])
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |x| self.get(x))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn constant_value(&self) -> Option<bool> {
        match self.count_ones() {
            0 => Some(false),
            c if c == self.len() => Some(true),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    /// Whether flipping bit `i` of `x` changes the value.
    #[inline]
    pub fn is_sensitive(&self, x: usize, i: usize) -> bool {
        self.get(x) != self.get(x ^ (1 << i))
    }

    /// Output negation.
    pub fn negate(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    /// `x ↦ f(x ⊕ mask)`.
    pub fn flip_inputs(&self, mask: usize) -> Self {
        Self::from_fn(self.n, |x| self.get(x ^ mask)).expect("arity already validated")
    }

    /// Renames variables: the result `g` satisfies `g(y) = f(x)` where bit
    /// `perm[i]` of `y` equals bit `i` of `x`.
    pub fn permute_vars(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::Dimension(format!(
                "permutation of length {} for arity {}",
                perm.len(),
                self.n
            )));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Precondition(format!(
                    "{perm:?} is not a permutation"
                )));
            }
        }
        let mut out = Self::constant(self.n, false)?;
        for x in 0..self.len() {
            if self.get(x) {
                let y = (0..self.n)
                    .filter(|&i| x >> i & 1 == 1)
                    .fold(0usize, |acc, i| acc | 1 << perm[i]);
                out.words[y >> 6] |= 1 << (y & 63);
            }
        }
        Ok(out)
    }

    /// Subfunction obtained by fixing the given `(variable, value)` pairs.
    /// The free variables keep their relative order and are renumbered from 0.
    pub fn restrict(&self, assignment: &[(usize, bool)]) -> Result<Self> {
        let mut fixed_mask = 0usize;
        let mut fixed_bits = 0usize;
        for &(i, v) in assignment {
            if i >= self.n {
                return Err(Error::VariableIndex {
                    index: i,
                    arity: self.n,
                });
            }
            if fixed_mask >> i & 1 == 1 {
                return Err(Error::DuplicateAssignment(i));
            }
            fixed_mask |= 1 << i;
            if v {
                fixed_bits |= 1 << i;
            }
        }
        let free: Vec<usize> = (0..self.n).filter(|&i| fixed_mask >> i & 1 == 0).collect();
        Self::from_fn(free.len(), |y| {
            let x = free
                .iter()
                .enumerate()
                .filter(|&(k, _)| y >> k & 1 == 1)
                .fold(fixed_bits, |acc, (_, &i)| acc | 1 << i);
            self.get(x)
        })
    }

    /// Block composition `f ∘ g`: `n` copies of `g` on disjoint blocks of
    /// `m` bits feed `f`. Block `i` occupies bits `i·m .. (i+1)·m`.
    pub fn compose(&self, g: &TruthTable) -> Result<Self> {
        let (n, m) = (self.n, g.n);
        check_arity("composition", n * m, MAX_ARITY)?;
        let block = (1usize << m) - 1;
        Self::from_fn(n * m, |x| {
            let z = (0..n).fold(0usize, |acc, i| {
                acc | (g.bit(x >> (i * m) & block) as usize) << i
            });
            self.get(z)
        })
    }

    /// Hex digits of the integer `Σ f(x)·2^x`, most significant digit first,
    /// zero padded to `⌈2^n / 4⌉` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.len().div_ceil(4);
        (0..digits)
            .rev()
            .map(|d| {
                let nibble = (0..4)
                    .filter(|b| d * 4 + b < self.len() && self.get(d * 4 + b))
                    .fold(0u32, |acc, b| acc | 1 << b);
                char::from_digit(nibble, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        check_arity("truth tables", n, MAX_ARITY)?;
        let bad = |reason: String| Error::FunctionSpec {
            spec: format!("tt:{n}:{hex}"),
            reason,
        };
        let len = 1usize << n;
        let mut out = Self::constant(n, false)?;
        for (d, c) in hex.trim().chars().rev().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| bad(format!("`{c}` is not a hex digit")))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let x = d * 4 + b;
                    if x >= len {
                        return Err(bad(format!("table has more than 2^{n} bits")));
                    }
                    out.words[x >> 6] |= 1 << (x & 63);
                }
            }
        }
        Ok(out)
    }

    fn clear_tail(&mut self) {
        let len = self.len();
        if len < 64 {
            self.words[0] &= (1u64 << len) - 1;
        }
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tt:{}:{}", self.n, self.to_hex())
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for TruthTable {
    type Err = Error;

    /// Parses the `tt:<n>:<hex>` form.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::FunctionSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let rest = s
            .strip_prefix("tt:")
            .ok_or_else(|| bad("expected `tt:<n>:<hex>`"))?;
        let (n, hex) = rest
            .split_once(':')
            .ok_or_else(|| bad("expected `tt:<n>:<hex>`"))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| bad("arity is not an integer"))?;
        Self::from_hex(n, hex)
    }
}

/// Iterates over every Boolean function on `n ≤ 4` bits in increasing order
/// of its packed table.
pub fn all_functions(n: usize) -> Result<impl Iterator<Item = TruthTable>> {
    check_arity("exhaustive enumeration", n, 4)?;
    let count = 1u64 << (1u32 << n);
    Ok((0..count).map(move |bits| TruthTable::from_u64(n, bits).unwrap()))
}

#[inline]
pub fn hamming_weight(x: usize) -> usize {
    x.count_ones() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tt(n: usize, values: &str) -> TruthTable {
        let v: Vec<bool> = values.chars().map(|c| c == '1').collect();
        TruthTable::from_values(n, &v).unwrap()
    }

    #[test]
    fn hex_is_little_endian_in_index() {
        let or2 = tt(2, "0111");
        assert_eq!(or2.to_hex(), "e");
        assert_eq!("tt:2:e".parse::<TruthTable>().unwrap(), or2);
        let rule30 = TruthTable::from_u64(3, 0x1e).unwrap();
        assert_eq!(rule30.to_string(), "tt:3:1e");
        assert_eq!(TruthTable::from_hex(1, "2").unwrap().to_hex(), "2");
    }

    #[test]
    fn hex_rejects_garbage_and_overflow() {
        assert!("tt:2:g".parse::<TruthTable>().is_err());
        assert!("tt:2:1f".parse::<TruthTable>().is_err());
        assert!("tt:x:1".parse::<TruthTable>().is_err());
        assert!("2:1".parse::<TruthTable>().is_err());
        assert!(TruthTable::from_hex(25, "0").is_err());
    }

    #[test]
    fn restriction_examples() {
        let or3 = TruthTable::from_fn(3, |x| x != 0).unwrap();
        let or2 = TruthTable::from_fn(2, |x| x != 0).unwrap();
        assert_eq!(or3.restrict(&[(2, false)]).unwrap(), or2);
        assert_eq!(
            or3.restrict(&[(2, true)]).unwrap(),
            TruthTable::constant(2, true).unwrap()
        );

        let par3 = TruthTable::from_fn(3, |x| x.count_ones() % 2 == 1).unwrap();
        let par2 = TruthTable::from_fn(2, |x| x.count_ones() % 2 == 1).unwrap();
        assert_eq!(par3.restrict(&[(0, true)]).unwrap(), par2.negate());

        assert_eq!(
            or3.restrict(&[(3, true)]),
            Err(Error::VariableIndex { index: 3, arity: 3 })
        );
        assert_eq!(
            or3.restrict(&[(1, true), (1, false)]),
            Err(Error::DuplicateAssignment(1))
        );
    }

    #[test]
    fn composition_examples() {
        let or2 = tt(2, "0111");
        let and2 = tt(2, "0001");
        let or4 = TruthTable::from_fn(4, |x| x != 0).unwrap();
        assert_eq!(or2.compose(&or2).unwrap(), or4);

        let id = TruthTable::from_fn(1, |x| x == 1).unwrap();
        let f = TruthTable::from_u64(3, 0b1001_0110).unwrap();
        assert_eq!(f.compose(&id).unwrap(), f);

        let and_or = and2.compose(&or2).unwrap();
        for x in 0..16usize {
            let b = |i: usize| x >> i & 1 == 1;
            assert_eq!(and_or.get(x), (b(0) || b(1)) && (b(2) || b(3)));
        }
        let big = TruthTable::constant(5, true).unwrap();
        assert!(big.compose(&big).is_err());
    }

    #[test]
    fn permutation_and_negation() {
        let f = tt(3, "00010111"); // majority
        let g = tt(3, "00000111");
        let p = g.permute_vars(&[2, 0, 1]).unwrap();
        for x in 0..8usize {
            let y = ((x & 1) << 2) | (x >> 1 & 1) | ((x >> 2 & 1) << 1);
            assert_eq!(p.get(y), g.get(x));
        }
        assert_eq!(f.permute_vars(&[1, 2, 0]).unwrap(), f);
        assert_eq!(f.negate().negate(), f);
        assert_eq!(f.negate().count_ones(), 4);
        assert!(f.permute_vars(&[0, 0, 1]).is_err());
    }

    #[test]
    fn enumeration_is_complete() {
        assert_eq!(all_functions(2).unwrap().count(), 16);
        assert_eq!(all_functions(4).unwrap().count(), 65536);
        assert!(all_functions(5).is_err());
    }
}
