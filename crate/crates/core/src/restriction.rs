// SPDX-License-Identifier: Apache-2.0

//! Partial assignments of the cube's coordinates.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{JuntaError, Result};
use crate::oracle::{BooleanFunction, BooleanOracle};
use crate::point::{word_count, Point, Sign, Words};
use crate::rng::JuntaRng;

/// A restriction pattern: `0` marks a surviving coordinate, `±1` a fixed one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Restriction {
    pattern: Vec<i8>,
}

impl Restriction {
    pub fn new(pattern: Vec<i8>) -> Result<Restriction> {
        if pattern.iter().any(|&v| !(-1..=1).contains(&v)) {
            return Err(JuntaError::argument("restriction entries must be -1, 0 or 1"));
        }
        Ok(Restriction { pattern })
    }

    pub fn all_survive(n: usize) -> Restriction {
        Restriction {
            pattern: vec![0; n],
        }
    }

    /// Each coordinate survives with probability `mu`, otherwise it is fixed
    /// to a uniform sign.
    pub fn sample(mu: f64, n: usize, rng: &mut JuntaRng) -> Result<Restriction> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(JuntaError::argument("survival probability must lie in [0, 1]"));
        }
        let pattern = (0..n)
            .map(|_| {
                if rng.random::<f64>() < mu {
                    0
                } else if rng.random::<bool>() {
                    -1
                } else {
                    1
                }
            })
            .collect();
        Ok(Restriction { pattern })
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.pattern.len()
    }

    #[inline]
    pub fn pattern(&self) -> &[i8] {
        &self.pattern
    }

    pub fn survives(&self, i: usize) -> bool {
        self.pattern[i] == 0
    }

    pub fn survivors(&self) -> Vec<usize> {
        (0..self.pattern.len())
            .filter(|&i| self.pattern[i] == 0)
            .collect()
    }

    /// The pattern as a real point, the form taken by discrete derivatives.
    pub fn as_rho_point(&self) -> Vec<f64> {
        self.pattern.iter().map(|&v| v as f64).collect()
    }

    /// Bits of the surviving coordinates.
    pub(crate) fn survivor_mask(&self) -> Words {
        let mut w = Words::from_elem(0, word_count(self.dimension()));
        for (i, &v) in self.pattern.iter().enumerate() {
            if v == 0 {
                w[i / 64] |= 1 << (i % 64);
            }
        }
        w
    }

    /// Bits of the coordinates fixed to −1.
    pub(crate) fn fixed_minus(&self) -> Words {
        let mut w = Words::from_elem(0, word_count(self.dimension()));
        for (i, &v) in self.pattern.iter().enumerate() {
            if v == -1 {
                w[i / 64] |= 1 << (i % 64);
            }
        }
        w
    }

    /// The full point whose survivors are read from `x` (dimension |S|).
    pub fn apply(&self, x: &Point) -> Point {
        let mut z = Point::ones(self.dimension());
        let mut j = 0;
        for (i, &v) in self.pattern.iter().enumerate() {
            let s = match v {
                0 => {
                    j += 1;
                    x.get(j - 1)
                }
                -1 => Sign::Minus,
                _ => Sign::Plus,
            };
            z.set(i, s);
        }
        z
    }

    /// The in-place rewrite that fixes the non-surviving coordinates.
    pub(crate) fn overlay(&self) -> Overlay {
        Overlay {
            keep: self.survivor_mask(),
            fixed: self.fixed_minus(),
        }
    }

    /// `f↾ξ` as an oracle on the survivors, charged to `f`'s counter.
    pub fn restrict(&self, f: &BooleanOracle) -> Result<BooleanOracle> {
        self.check(f)?;
        Ok(f.derive(Arc::new(Restricted {
            inner: Arc::clone(f.function()),
            restriction: self.clone(),
            survivors: self.survivors().len(),
        })))
    }

    /// `f↾ξ` viewed on the ambient cube: the fixed coordinates of the query
    /// are overwritten, so the result ignores them.
    pub fn lift(&self, f: &BooleanOracle) -> Result<BooleanOracle> {
        self.check(f)?;
        Ok(f.derive(Arc::new(Lifted {
            inner: Arc::clone(f.function()),
            overlay: self.overlay(),
            n: self.dimension(),
        })))
    }

    fn check(&self, f: &BooleanOracle) -> Result<()> {
        if f.dimension() != self.dimension() {
            return Err(JuntaError::argument(format!(
                "restriction has dimension {}, oracle has {}",
                self.dimension(),
                f.dimension()
            )));
        }
        Ok(())
    }
}

struct Restricted {
    inner: Arc<dyn BooleanFunction>,
    restriction: Restriction,
    survivors: usize,
}

impl BooleanFunction for Restricted {
    fn dimension(&self) -> usize {
        self.survivors
    }
    fn eval(&self, x: &Point) -> Sign {
        self.inner.eval(&self.restriction.apply(x))
    }
}

/// Survivor mask and fixed −1 bits of a restriction.
#[derive(Clone, Debug)]
pub(crate) struct Overlay {
    keep: Words,
    fixed: Words,
}

impl Overlay {
    #[inline]
    pub(crate) fn apply(&self, p: &mut Point) {
        for ((w, k), f) in p.words_mut().iter_mut().zip(&self.keep).zip(&self.fixed) {
            *w = (*w & k) | f;
        }
    }
}

struct Lifted {
    inner: Arc<dyn BooleanFunction>,
    overlay: Overlay,
    n: usize,
}

impl BooleanFunction for Lifted {
    fn dimension(&self) -> usize {
        self.n
    }
    fn eval(&self, x: &Point) -> Sign {
        let mut z = x.clone();
        self.overlay.apply(&mut z);
        self.inner.eval(&z)
    }
}
