// SPDX-License-Identifier: Apache-2.0

//! Standard test functions, defined implicitly so they work at any `n`.

use crate::oracle::BooleanFunction;
use crate::point::{Point, Sign};
use crate::table::TruthTable;

/// `±x_i`.
#[derive(Clone, Debug)]
pub struct Dictator {
    pub n: usize,
    pub coord: usize,
    pub negated: bool,
}

impl Dictator {
    pub fn new(n: usize, coord: usize) -> Self {
        Dictator {
            n,
            coord,
            negated: false,
        }
    }
}

impl BooleanFunction for Dictator {
    fn dimension(&self) -> usize {
        self.n
    }
    fn eval(&self, x: &Point) -> Sign {
        Sign::from_bit(x.is_minus(self.coord) != self.negated)
    }
}

/// `χ_S(x) = Π_{i∈S} x_i`; the empty set gives the constant +1.
#[derive(Clone, Debug)]
pub struct Parity {
    pub n: usize,
    pub coords: Vec<usize>,
}

impl BooleanFunction for Parity {
    fn dimension(&self) -> usize {
        self.n
    }
    fn eval(&self, x: &Point) -> Sign {
        let odd = self.coords.iter().filter(|&&i| x.is_minus(i)).count() % 2 == 1;
        Sign::from_bit(odd)
    }
}

/// Majority of an odd number of coordinates.
#[derive(Clone, Debug)]
pub struct Majority {
    pub n: usize,
    pub coords: Vec<usize>,
}

impl BooleanFunction for Majority {
    fn dimension(&self) -> usize {
        self.n
    }
    fn eval(&self, x: &Point) -> Sign {
        let minus = self.coords.iter().filter(|&&i| x.is_minus(i)).count();
        Sign::from_bit(2 * minus > self.coords.len())
    }
}

/// Constant function.
#[derive(Clone, Debug)]
pub struct Constant {
    pub n: usize,
    pub value: Sign,
}

impl BooleanFunction for Constant {
    fn dimension(&self) -> usize {
        self.n
    }
    fn eval(&self, _x: &Point) -> Sign {
        self.value
    }
}

/// A function of the listed coordinates given by a table on them; bit `j`
/// of the table index is coordinate `coords[j]`.
#[derive(Clone, Debug)]
pub struct JuntaTable {
    pub n: usize,
    pub coords: Vec<usize>,
    pub table: TruthTable,
}

impl JuntaTable {
    pub fn local_index(&self, x: &Point) -> u64 {
        self.coords
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &c)| acc | ((x.is_minus(c) as u64) << j))
    }
}

impl BooleanFunction for JuntaTable {
    fn dimension(&self) -> usize {
        self.n
    }
    fn eval(&self, x: &Point) -> Sign {
        self.table.get(self.local_index(x))
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `inner` with each label independently flipped with probability `rate`,
/// where the coin for a point is a keyed hash of the point. The result is a
/// fixed function, so repeated queries agree.
pub struct HashedNoise<F> {
    pub inner: F,
    pub rate: f64,
    pub key: u64,
}

impl<F> HashedNoise<F> {
    pub fn flipped(&self, x: &Point) -> bool {
        let h = x
            .words()
            .iter()
            .fold(splitmix(self.key), |acc, &w| splitmix(acc ^ w));
        (h as f64) < self.rate * 18446744073709551616.0
    }
}

impl<F: BooleanFunction> BooleanFunction for HashedNoise<F> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }
    fn eval(&self, x: &Point) -> Sign {
        let v = self.inner.eval(x);
        if self.flipped(x) {
            -v
        } else {
            v
        }
    }
}

/// Tabulates a function of dimension at most the table cap.
pub fn tabulate(f: &dyn BooleanFunction) -> crate::Result<TruthTable> {
    let n = f.dimension();
    TruthTable::from_fn(n, |idx| f.eval(&Point::from_index(n, idx)))
}
