//! Shared fixtures for the benchmarks.

use bftk_core::{from_family, TruthTable};

/// A fixed pseudo-random function on `n` bits (xorshift over the index).
pub fn scrambled(n: usize, seed: u64) -> TruthTable {
    TruthTable::from_fn(n, |x| {
        let mut s = seed ^ (x as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        s & 1 == 1
    })
    .expect("arity within range")
}

pub fn family(name: &str, params: &[usize]) -> TruthTable {
    from_family(name, params).expect("registered family")
}
