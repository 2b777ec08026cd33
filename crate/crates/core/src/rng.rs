// SPDX-License-Identifier: Apache-2.0

//! Seeded randomness. Every randomized routine takes an explicit generator;
//! parallel workers get their own streams derived from pre-drawn seeds.

use rand::{RngCore, SeedableRng};

/// The generator used throughout the crate. Xoshiro256++ has a fixed,
/// documented output sequence, so seeded runs reproduce across platforms.
pub type JuntaRng = rand_xoshiro::Xoshiro256PlusPlus;

pub fn rng_from_seed(seed: u64) -> JuntaRng {
    JuntaRng::seed_from_u64(seed)
}

/// Draws `count` child seeds from `rng`, one per independent worker.
pub fn child_seeds(rng: &mut JuntaRng, count: usize) -> Vec<u64> {
    (0..count).map(|_| rng.next_u64()).collect()
}
