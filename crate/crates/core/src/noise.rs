// SPDX-License-Identifier: Apache-2.0

//! Product noise `Z_η`: independent signs with `E[z_i] = η_i`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{JuntaError, Result};
use crate::point::{word_count, Point, Words};
use crate::rng::JuntaRng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseVector {
    eta: Vec<f64>,
}

impl NoiseVector {
    pub fn new(eta: Vec<f64>) -> Result<NoiseVector> {
        if eta.iter().any(|e| !(-1.0..=1.0).contains(e)) {
            return Err(JuntaError::argument("noise entries must lie in [-1, 1]"));
        }
        Ok(NoiseVector { eta })
    }

    pub fn constant(n: usize, value: f64) -> Result<NoiseVector> {
        NoiseVector::new(vec![value; n])
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.eta.len()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.eta
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.eta[i]
    }

    /// `η^S = Π_{i∈S} η_i` for a mask over the first 64 coordinates.
    pub fn monomial(&self, mask: u64) -> f64 {
        let mut rest = mask;
        let mut prod = 1.0;
        while rest != 0 {
            prod *= self.eta[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        prod
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.eta.len()).filter(|&i| self.eta[i] != 0.0).collect()
    }

    pub fn sampler(&self) -> NoiseSampler {
        NoiseSampler::new(self)
    }
}

/// Precomputed sampler for `Z_η`.
///
/// Coordinates with `η_i = 0` take raw random bits a word at a time, which
/// keeps sparse noise vectors cheap; the others get one threshold draw each.
#[derive(Clone, Debug)]
pub struct NoiseSampler {
    n: usize,
    uniform: Words,
    always_minus: Words,
    biased: Vec<(usize, u64)>,
}

impl NoiseSampler {
    pub fn new(eta: &NoiseVector) -> NoiseSampler {
        let n = eta.dimension();
        let words = word_count(n);
        let mut uniform = Words::from_elem(0, words);
        let mut always_minus = Words::from_elem(0, words);
        let mut biased = Vec::new();
        for (i, &e) in eta.values().iter().enumerate() {
            let bit = 1u64 << (i % 64);
            if e == 0.0 {
                uniform[i / 64] |= bit;
            } else if e == -1.0 {
                always_minus[i / 64] |= bit;
            } else if e != 1.0 {
                // Pr[z_i = −1] = (1 − η_i)/2, compared against a 64-bit draw.
                let q = (1.0 - e) / 2.0;
                biased.push((i, (q * 18446744073709551616.0) as u64));
            }
        }
        NoiseSampler {
            n,
            uniform,
            always_minus,
            biased,
        }
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Writes a fresh draw of `z` into `out`.
    #[inline]
    pub fn sample_into(&self, rng: &mut JuntaRng, out: &mut Point) {
        debug_assert_eq!(out.dimension(), self.n);
        let words = out.words_mut();
        for (w, (u, m)) in words
            .iter_mut()
            .zip(self.uniform.iter().zip(self.always_minus.iter()))
        {
            *w = if *u == 0 { 0 } else { rng.next_u64() & u } | m;
        }
        for &(i, thr) in &self.biased {
            if rng.next_u64() < thr {
                words[i / 64] |= 1 << (i % 64);
            }
        }
    }

    pub fn sample(&self, rng: &mut JuntaRng) -> Point {
        let mut z = Point::ones(self.n);
        self.sample_into(rng, &mut z);
        z
    }
}

/// `x · z` with `z ∼ Z_η`.
pub fn sample_noisy(x: &Point, eta: &NoiseVector, rng: &mut JuntaRng) -> Result<Point> {
    if x.dimension() != eta.dimension() {
        return Err(JuntaError::argument("point and noise vector dimensions differ"));
    }
    let mut z = eta.sampler().sample(rng);
    z.mul_assign(x);
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn all_ones_noise_is_identity() {
        let mut rng = rng_from_seed(2);
        let x = Point::random(70, &mut rng);
        let eta = NoiseVector::constant(70, 1.0).unwrap();
        assert_eq!(sample_noisy(&x, &eta, &mut rng).unwrap(), x);
    }

    #[test]
    fn minus_one_noise_negates() {
        let mut rng = rng_from_seed(2);
        let x = Point::random(10, &mut rng);
        let eta = NoiseVector::constant(10, -1.0).unwrap();
        let y = sample_noisy(&x, &eta, &mut rng).unwrap();
        assert_eq!(y.hamming(&x), 10);
    }

    #[test]
    fn flip_rate_matches_bias() {
        let mut rng = rng_from_seed(9);
        let n = 8;
        let eta = NoiseVector::constant(n, 1.0 - 2.0 * 0.05).unwrap();
        let x = Point::ones(n);
        let mut flips = vec![0u32; n];
        let draws = 10_000;
        for _ in 0..draws {
            let y = sample_noisy(&x, &eta, &mut rng).unwrap();
            for (i, f) in flips.iter_mut().enumerate() {
                *f += y.is_minus(i) as u32;
            }
        }
        for f in flips {
            let rate = f as f64 / draws as f64;
            assert!((rate - 0.05).abs() <= 0.01, "{rate}");
        }
    }

    #[test]
    fn zero_noise_is_uniform() {
        let mut rng = rng_from_seed(4);
        let eta = NoiseVector::constant(3, 0.0).unwrap();
        let x = Point::from_index(3, 5);
        let mut counts = [0u32; 8];
        for _ in 0..8000 {
            counts[sample_noisy(&x, &eta, &mut rng).unwrap().index() as usize] += 1;
        }
        assert!(counts.iter().all(|&c| (800..1200).contains(&c)), "{counts:?}");
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(NoiseVector::new(vec![0.5, 1.5]).is_err());
    }
}
