//! Registry of named function families.

use crate::error::{Error, Result};
use crate::truth_table::{hamming_weight, TruthTable, MAX_ARITY};

/// `(name, parameter description)` for every registered family.
pub const FAMILIES: &[(&str, &str)] = &[
    ("const0", "n"),
    ("const1", "n"),
    ("id", "n (dictator x1 on n bits)"),
    ("or", "n"),
    ("and", "n"),
    ("parity", "n"),
    ("maj", "n (odd)"),
    ("threshold", "n,t (1 iff |x| >= t)"),
    ("and-or", "k,l (AND_k of OR_l)"),
    ("or-and", "k,l (OR_k of AND_l)"),
    ("nand-tree", "h (complete binary NAND tree of depth h)"),
    ("hw1", "n (1 iff |x| = 1)"),
    ("xor-or", "n (x1 xor OR(x2..xn))"),
];

/// Truth table of the named family member.
pub fn from_family(name: &str, params: &[usize]) -> Result<TruthTable> {
    let bad = |reason: &str| Error::FamilyParams {
        family: name.to_string(),
        reason: reason.to_string(),
    };
    let one = |params: &[usize]| -> Result<usize> {
        match params {
            [n] if *n >= 1 => Ok(*n),
            [_] => Err(bad("arity must be at least 1")),
            _ => Err(bad("expected exactly one parameter")),
        }
    };
    let two = |params: &[usize]| -> Result<(usize, usize)> {
        match params {
            [a, b] if *a >= 1 && *b >= 1 => Ok((*a, *b)),
            [_, _] => Err(bad("parameters must be at least 1")),
            _ => Err(bad("expected exactly two parameters")),
        }
    };
    match name {
        "const0" => TruthTable::constant(one(params)?, false),
        "const1" => TruthTable::constant(one(params)?, true),
        "id" => TruthTable::from_fn(one(params)?, |x| x & 1 == 1),
        "or" => TruthTable::from_fn(one(params)?, |x| x != 0),
        "and" => {
            let n = one(params)?;
            TruthTable::from_fn(n, |x| x == (1 << n) - 1)
        }
        "parity" => TruthTable::from_fn(one(params)?, |x| hamming_weight(x) % 2 == 1),
        "maj" => {
            let n = one(params)?;
            if n % 2 == 0 {
                return Err(bad("majority needs an odd arity"));
            }
            TruthTable::from_fn(n, |x| 2 * hamming_weight(x) > n)
        }
        "threshold" => {
            let (n, t) = match params {
                [n, t] if *n >= 1 => (*n, *t),
                _ => return Err(bad("expected n,t with n >= 1")),
            };
            TruthTable::from_fn(n, |x| hamming_weight(x) >= t)
        }
        "and-or" | "or-and" => {
            let (k, l) = two(params)?;
            if k * l > MAX_ARITY {
                return Err(Error::ArityCap {
                    what: "truth tables",
                    arity: k * l,
                    cap: MAX_ARITY,
                });
            }
            let (outer, inner) = if name == "and-or" {
                (from_family("and", &[k])?, from_family("or", &[l])?)
            } else {
                (from_family("or", &[k])?, from_family("and", &[l])?)
            };
            outer.compose(&inner)
        }
        "nand-tree" => {
            let h = match params {
                [h] => *h,
                _ => return Err(bad("expected the tree depth")),
            };
            if h == 0 {
                return TruthTable::from_fn(1, |x| x == 1);
            }
            let n = 1usize << h;
            if n > MAX_ARITY {
                return Err(Error::ArityCap {
                    what: "truth tables",
                    arity: n,
                    cap: MAX_ARITY,
                });
            }
            TruthTable::from_fn(n, |x| nand_tree(x, 0, n))
        }
        "hw1" => TruthTable::from_fn(one(params)?, |x| hamming_weight(x) == 1),
        "xor-or" => TruthTable::from_fn(one(params)?, |x| (x & 1 == 1) != (x >> 1 != 0)),
        _ => Err(Error::UnknownFamily(name.to_string())),
    }
}

fn nand_tree(x: usize, lo: usize, len: usize) -> bool {
    if len == 1 {
        return x >> lo & 1 == 1;
    }
    let half = len / 2;
    !(nand_tree(x, lo, half) && nand_tree(x, lo + half, half))
}
