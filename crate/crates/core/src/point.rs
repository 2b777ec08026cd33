// SPDX-License-Identifier: Apache-2.0

//! Points of the ±1 cube, bit-packed.
//!
//! Coordinate `i` is stored in bit `i % 64` of word `i / 64`; a clear bit is
//! +1 and a set bit is −1. The coordinatewise product of two points is then
//! the XOR of their words.

use std::fmt;
use std::ops::{Mul, Neg};

use rand::RngCore;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn from_bit(minus: bool) -> Sign {
        if minus {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    /// Sign of a real with the convention sgn(0) = +1.
    #[inline]
    pub fn of(value: f64) -> Sign {
        Sign::from_bit(value < 0.0)
    }

    #[inline]
    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    #[inline]
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    #[inline]
    fn neg(self) -> Sign {
        Sign::from_bit(!self.is_minus())
    }
}

impl Mul for Sign {
    type Output = Sign;
    #[inline]
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bit(self.is_minus() != rhs.is_minus())
    }
}

pub(crate) type Words = SmallVec<[u64; 2]>;

#[inline]
pub(crate) fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

/// Mask of the valid bits in the last word of an `n`-bit point.
#[inline]
pub(crate) fn tail_mask(n: usize) -> u64 {
    match n % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point {
    n: usize,
    words: Words,
}

impl Point {
    /// The all-(+1) point.
    pub fn ones(n: usize) -> Point {
        Point {
            n,
            words: SmallVec::from_elem(0, word_count(n)),
        }
    }

    pub fn random<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Point {
        let mut p = Point::ones(n);
        p.randomize(rng);
        p
    }

    /// Overwrites every coordinate with a fresh uniform bit.
    pub fn randomize<R: RngCore + ?Sized>(&mut self, rng: &mut R) {
        for w in self.words.iter_mut() {
            *w = rng.next_u64();
        }
        self.clear_tail();
    }

    /// Point whose bit `i` is bit `i` of `index`. Requires `n <= 64`.
    pub fn from_index(n: usize, index: u64) -> Point {
        assert!(n <= 64, "from_index needs n <= 64");
        let mut p = Point::ones(n);
        if n > 0 {
            p.words[0] = index & tail_mask(n);
        }
        p
    }

    pub fn from_signs(signs: &[Sign]) -> Point {
        let mut p = Point::ones(signs.len());
        for (i, s) in signs.iter().enumerate() {
            if s.is_minus() {
                p.flip(i);
            }
        }
        p
    }

    /// Table index of the point. Requires `n <= 64`.
    #[inline]
    pub fn index(&self) -> u64 {
        debug_assert!(self.n <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn is_minus(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn get(&self, i: usize) -> Sign {
        Sign::from_bit(self.is_minus(i))
    }

    #[inline]
    pub fn set(&mut self, i: usize, s: Sign) {
        let bit = 1u64 << (i % 64);
        if s.is_minus() {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Coordinatewise product, in place.
    #[inline]
    pub fn mul_assign(&mut self, other: &Point) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= *b;
        }
    }

    /// Coordinatewise product.
    #[inline]
    pub fn product(&self, other: &Point) -> Point {
        let mut p = self.clone();
        p.mul_assign(other);
        p
    }

    /// Number of −1 coordinates.
    pub fn minus_count(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Number of coordinates where the points differ.
    pub fn hamming(&self, other: &Point) -> u32 {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }

    pub fn signs(&self) -> Vec<Sign> {
        (0..self.n).map(|i| self.get(i)).collect()
    }

    fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.n);
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point(")?;
        for i in 0..self.n {
            f.write_str(if self.is_minus(i) { "-" } else { "+" })?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn product_is_xor() {
        let a = Point::from_signs(&[Sign::Plus, Sign::Minus, Sign::Minus]);
        let b = Point::from_signs(&[Sign::Minus, Sign::Minus, Sign::Plus]);
        let c = a.product(&b);
        assert_eq!(c.signs(), vec![Sign::Minus, Sign::Plus, Sign::Minus]);
    }

    #[test]
    fn random_point_respects_dimension() {
        let mut rng = rng_from_seed(3);
        for n in [1, 5, 63, 64, 65, 130] {
            let p = Point::random(n, &mut rng);
            assert!(p.minus_count() as usize <= n);
            let last = *p.words().last().unwrap();
            assert_eq!(last & !tail_mask(n), 0);
        }
    }

    #[test]
    fn index_round_trip() {
        let p = Point::from_index(5, 0b10110);
        assert!(!p.is_minus(0));
        assert!(p.is_minus(1));
        assert_eq!(p.index(), 0b10110);
    }

    #[test]
    fn sign_algebra() {
        assert_eq!(Sign::Minus * Sign::Minus, Sign::Plus);
        assert_eq!(-Sign::Plus, Sign::Minus);
        assert_eq!(Sign::of(0.0), Sign::Plus);
        assert_eq!(Sign::of(-1e-9), Sign::Minus);
    }
}
