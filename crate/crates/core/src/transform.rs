//! In-place butterfly transforms over the subset lattice of `[n]`.
//!
//! All three run in `O(n·2^n)` and require a power-of-two slice length.

use std::ops::{Add, Sub};

/// Unnormalized Walsh–Hadamard transform: `a[S] ← Σ_x a[x]·(−1)^{|S∩x|}`.
/// Applying it twice multiplies the input by `len`.
pub fn fwht<T>(a: &mut [T])
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    debug_assert!(a.len().is_power_of_two());
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*u + *v, *u - *v);
                *u = s;
                *v = d;
            }
        }
        h *= 2;
    }
}

/// Möbius inversion over subsets: `a[S] ← Σ_{T⊆S} (−1)^{|S∖T|} a[T]`.
/// Turns the value table of a function into its multilinear coefficients.
pub fn mobius<T>(a: &mut [T])
where
    T: Copy + Sub<Output = T>,
{
    debug_assert!(a.len().is_power_of_two());
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (u, v) in lo.iter().zip(hi.iter_mut()) {
                *v = *v - *u;
            }
        }
        h *= 2;
    }
}

/// Zeta transform (inverse of [`mobius`]): `a[S] ← Σ_{T⊆S} a[T]`.
pub fn zeta<T>(a: &mut [T])
where
    T: Copy + Add<Output = T>,
{
    debug_assert!(a.len().is_power_of_two());
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (u, v) in lo.iter().zip(hi.iter_mut()) {
                *v = *v + *u;
            }
        }
        h *= 2;
    }
}

/// Reed–Muller transform over GF(2) on packed bits: `a[S] ← ⊕_{T⊆S} a[T]`.
/// It is its own inverse.
pub fn reed_muller(a: &mut [bool]) {
    debug_assert!(a.len().is_power_of_two());
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (u, v) in lo.iter().zip(hi.iter_mut()) {
                *v ^= *u;
            }
        }
        h *= 2;
    }
}
