//! Seeded randomness.
//!
//! Every random choice in the crate is driven by `Xoshiro256**` seeded
//! through SplitMix64 (`seed_from_u64`). Integers in `0..bound` are drawn by
//! the widening-multiply rule `(next_u64 * bound) >> 64`; uniform reals in
//! `[0, 1)` use the top 53 bits of `next_u64`. Both rules are simple enough to
//! reproduce in any language.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256StarStar};

pub type Rng = Xoshiro256StarStar;

pub fn seeded(seed: u64) -> Rng {
    Xoshiro256StarStar::seed_from_u64(seed)
}

/// Derives the seed of instance `index` from a batch master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut mix = SplitMix64::seed_from_u64(master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    mix.next_u64()
}

pub fn below(rng: &mut Rng, bound: usize) -> usize {
    ((rng.next_u64() as u128 * bound as u128) >> 64) as usize
}

pub fn unit(rng: &mut Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Fisher–Yates, walking from the last slot down.
pub fn shuffle<T>(rng: &mut Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i + 1);
        items.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shuffle_is_a_permutation_and_deterministic() {
        let mut a: Vec<usize> = (0..50).collect();
        let mut b = a.clone();
        shuffle(&mut seeded(3), &mut a);
        shuffle(&mut seeded(3), &mut b);
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn derived_seeds_differ() {
        let s: Vec<u64> = (0..10).map(|i| derive_seed(42, i)).collect();
        let mut d = s.clone();
        d.dedup();
        assert_eq!(s.len(), d.len());
    }

    #[test]
    fn below_stays_in_range() {
        let mut rng = seeded(9);
        for bound in 1..40 {
            for _ in 0..50 {
                assert!(below(&mut rng, bound) < bound);
            }
        }
    }
}
