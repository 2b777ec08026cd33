// SPDX-License-Identifier: Apache-2.0

//! Query access to functions on the cube.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::Result;
use crate::point::{Point, Sign};
use crate::rng::JuntaRng;
use crate::table::{RealTable, TruthTable};

/// A ±1-valued function on `{±1}^n`.
pub trait BooleanFunction: Send + Sync {
    fn dimension(&self) -> usize;
    fn eval(&self, x: &Point) -> Sign;
}

impl BooleanFunction for TruthTable {
    fn dimension(&self) -> usize {
        TruthTable::dimension(self)
    }
    fn eval(&self, x: &Point) -> Sign {
        TruthTable::eval(self, x)
    }
}

/// Adapts a closure into a [`BooleanFunction`].
pub struct FnFunction<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&Point) -> Sign + Send + Sync> FnFunction<F> {
    pub fn new(n: usize, f: F) -> Self {
        FnFunction { n, f }
    }
}

impl<F: Fn(&Point) -> Sign + Send + Sync> BooleanFunction for FnFunction<F> {
    fn dimension(&self) -> usize {
        self.n
    }
    fn eval(&self, x: &Point) -> Sign {
        (self.f)(x)
    }
}

/// Counted query access to a Boolean function.
///
/// Clones share the counter. Oracles derived through restriction also share
/// it, so one query to a derived oracle is one query to the original.
#[derive(Clone)]
pub struct BooleanOracle {
    func: Arc<dyn BooleanFunction>,
    counter: Arc<AtomicU64>,
}

impl fmt::Debug for BooleanOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BooleanOracle")
            .field("dimension", &self.dimension())
            .field("queries", &self.query_count())
            .finish()
    }
}

impl BooleanOracle {
    pub fn new(func: impl BooleanFunction + 'static) -> Self {
        BooleanOracle::from_arc(Arc::new(func))
    }

    pub fn from_arc(func: Arc<dyn BooleanFunction>) -> Self {
        BooleanOracle {
            func,
            counter: Arc::new(AtomicU64::new(0)),
        }
    }

    /// An oracle for `func` that charges queries to this oracle's counter.
    pub(crate) fn derive(&self, func: Arc<dyn BooleanFunction>) -> BooleanOracle {
        BooleanOracle {
            func,
            counter: Arc::clone(&self.counter),
        }
    }

    pub(crate) fn function(&self) -> &Arc<dyn BooleanFunction> {
        &self.func
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.func.dimension()
    }

    #[inline]
    pub fn query(&self, x: &Point) -> Sign {
        self.counter.fetch_add(1, Ordering::Relaxed);
        self.func.eval(x)
    }

    pub fn query_count(&self) -> u64 {
        self.counter.load(Ordering::Relaxed)
    }

    /// A local counter for hot loops, flushed to the shared one on drop.
    pub fn tally(&self) -> Tally<'_> {
        Tally {
            oracle: self,
            pending: 0,
        }
    }
}

pub struct Tally<'a> {
    oracle: &'a BooleanOracle,
    pending: u64,
}

impl Tally<'_> {
    #[inline]
    pub fn query(&mut self, x: &Point) -> Sign {
        self.pending += 1;
        self.oracle.func.eval(x)
    }
}

impl Drop for Tally<'_> {
    fn drop(&mut self) {
        self.oracle
            .counter
            .fetch_add(self.pending, Ordering::Relaxed);
    }
}

/// A randomized estimator of a real-valued function on the cube.
///
/// Each call returns a value within `accuracy()` of the target with
/// probability at least `1 - failure_probability()`.
pub trait RealOracle: Send + Sync {
    fn dimension(&self) -> usize;
    fn estimate(&self, x: &Point, rng: &mut JuntaRng) -> Result<f64>;
    fn accuracy(&self) -> f64;
    fn failure_probability(&self) -> f64;
    /// Expected number of queries to the underlying Boolean oracle per call.
    fn query_cost(&self) -> f64;
}

impl RealOracle for BooleanOracle {
    fn dimension(&self) -> usize {
        BooleanOracle::dimension(self)
    }
    fn estimate(&self, x: &Point, _rng: &mut JuntaRng) -> Result<f64> {
        Ok(self.query(x).value())
    }
    fn accuracy(&self) -> f64 {
        0.0
    }
    fn failure_probability(&self) -> f64 {
        0.0
    }
    fn query_cost(&self) -> f64 {
        1.0
    }
}

/// Exact access to a tabulated real function.
#[derive(Clone, Debug)]
pub struct TableRealOracle {
    table: Arc<RealTable>,
}

impl TableRealOracle {
    pub fn new(table: RealTable) -> Self {
        TableRealOracle {
            table: Arc::new(table),
        }
    }
}

impl RealOracle for TableRealOracle {
    fn dimension(&self) -> usize {
        self.table.dimension()
    }
    fn estimate(&self, x: &Point, _rng: &mut JuntaRng) -> Result<f64> {
        Ok(self.table.get(x.index()))
    }
    fn accuracy(&self) -> f64 {
        0.0
    }
    fn failure_probability(&self) -> f64 {
        0.0
    }
    fn query_cost(&self) -> f64 {
        0.0
    }
}
