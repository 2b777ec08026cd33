// SPDX-License-Identifier: Apache-2.0

//! Explicit truth tables and the `BFN1` file format.
//!
//! Entry `x` of a table on `n` variables is the value at the point whose bit
//! `i` is bit `i` of `x`. A `BFN1` file is the 4-byte magic `BFN1`, the
//! dimension as a little-endian `u32`, then `2^n` sign bits packed
//! little-endian within each byte (bit set for −1), padded to a whole byte.

use std::io::{Read, Write};

use crate::error::{JuntaError, Result};
use crate::point::{Point, Sign};

/// Largest dimension for which explicit tables are allowed.
pub const MAX_TABLE_DIMENSION: usize = 30;

const MAGIC: &[u8; 4] = b"BFN1";

fn check_dimension(n: usize) -> Result<()> {
    if n > MAX_TABLE_DIMENSION {
        return Err(JuntaError::Capacity {
            n,
            cap: MAX_TABLE_DIMENSION,
        });
    }
    Ok(())
}

/// A ±1-valued function stored as one bit per point.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruthTable {
    n: usize,
    bits: Vec<u64>,
}

impl TruthTable {
    /// The constant +1 function.
    pub fn constant_plus(n: usize) -> Result<TruthTable> {
        check_dimension(n)?;
        let len = 1usize << n;
        Ok(TruthTable {
            n,
            bits: vec![0; len.div_ceil(64)],
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(u64) -> Sign) -> Result<TruthTable> {
        let mut t = TruthTable::constant_plus(n)?;
        for x in 0..t.len() as u64 {
            if f(x).is_minus() {
                t.bits[(x / 64) as usize] |= 1 << (x % 64);
            }
        }
        Ok(t)
    }

    pub fn from_signs(n: usize, values: &[Sign]) -> Result<TruthTable> {
        if values.len() != 1usize << n {
            return Err(JuntaError::argument(format!(
                "expected {} entries, got {}",
                1usize << n,
                values.len()
            )));
        }
        TruthTable::from_fn(n, |x| values[x as usize])
    }

    /// Signs of the reals, with sgn(0) = +1.
    pub fn from_reals(n: usize, values: &[f64]) -> Result<TruthTable> {
        if values.len() != 1usize << n {
            return Err(JuntaError::argument("table length is not 2^n"));
        }
        TruthTable::from_fn(n, |x| Sign::of(values[x as usize]))
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        1usize << self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, x: u64) -> Sign {
        Sign::from_bit((self.bits[(x / 64) as usize] >> (x % 64)) & 1 == 1)
    }

    #[inline]
    pub fn set(&mut self, x: u64, s: Sign) {
        let w = &mut self.bits[(x / 64) as usize];
        let bit = 1u64 << (x % 64);
        if s.is_minus() {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn eval(&self, x: &Point) -> Sign {
        self.get(x.index())
    }

    pub fn to_reals(&self) -> Vec<f64> {
        (0..self.len() as u64).map(|x| self.get(x).value()).collect()
    }

    /// Fraction of points where the two tables differ.
    pub fn distance(&self, other: &TruthTable) -> f64 {
        assert_eq!(self.n, other.n);
        let diff: u64 = self
            .bits
            .iter()
            .zip(other.bits.iter())
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum();
        diff as f64 / self.len() as f64
    }

    pub fn write_bfn1<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        let bytes = self.len().div_ceil(8);
        let mut buf = Vec::with_capacity(bytes);
        for word in &self.bits {
            buf.extend_from_slice(&word.to_le_bytes());
        }
        buf.truncate(bytes);
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_bfn1<R: Read>(mut r: R) -> Result<TruthTable> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)
            .map_err(|_| JuntaError::Format("missing magic".into()))?;
        if &magic != MAGIC {
            return Err(JuntaError::Format("bad magic".into()));
        }
        let mut nb = [0u8; 4];
        r.read_exact(&mut nb)
            .map_err(|_| JuntaError::Format("missing dimension".into()))?;
        let n = u32::from_le_bytes(nb) as usize;
        check_dimension(n)?;
        let len = 1usize << n;
        let mut buf = vec![0u8; len.div_ceil(8)];
        r.read_exact(&mut buf)
            .map_err(|_| JuntaError::Format("truncated table".into()))?;
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(JuntaError::Format("trailing bytes".into()));
        }
        let mut bits = vec![0u64; len.div_ceil(64)];
        for (i, b) in buf.iter().enumerate() {
            bits[i / 8] |= (*b as u64) << (8 * (i % 8));
        }
        if len < 8 {
            bits[0] &= (1u64 << len) - 1;
        }
        Ok(TruthTable { n, bits })
    }
}

/// A real-valued function stored as one `f64` per point.
#[derive(Clone, PartialEq, Debug)]
pub struct RealTable {
    n: usize,
    values: Vec<f64>,
}

impl RealTable {
    pub fn new(n: usize, values: Vec<f64>) -> Result<RealTable> {
        check_dimension(n)?;
        if values.len() != 1usize << n {
            return Err(JuntaError::argument("table length is not 2^n"));
        }
        Ok(RealTable { n, values })
    }

    pub fn from_truth_table(t: &TruthTable) -> RealTable {
        RealTable {
            n: t.dimension(),
            values: t.to_reals(),
        }
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: u64) -> f64 {
        self.values[x as usize]
    }
}
