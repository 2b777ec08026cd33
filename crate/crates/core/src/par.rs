// SPDX-License-Identifier: Apache-2.0

//! Data-parallel helpers with a sequential fallback.
//!
//! Each work item receives its own RNG stream seeded from a list drawn up
//! front, and results are collected in item order. The output is therefore
//! identical in both modes; only wall time differs.

use serde::{Deserialize, Serialize};

use crate::rng::{rng_from_seed, JuntaRng};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    #[default]
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs
    /// sequentially.
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `0..count` in item order.
pub fn map_range<T, F>(exec: Execution, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..count).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..count).map(f).collect()
}

/// Maps `f` over the seeds, handing each call a fresh generator.
pub fn map_seeded<T, F>(exec: Execution, seeds: &[u64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut JuntaRng) -> T + Sync + Send,
{
    map_range(exec, seeds.len(), |i| {
        let mut rng = rng_from_seed(seeds[i]);
        f(i, &mut rng)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn modes_agree() {
        let seeds: Vec<u64> = (0..64).collect();
        let work = |i: usize, rng: &mut JuntaRng| i as u64 ^ rng.random::<u64>();
        let a = map_seeded(Execution::Sequential, &seeds, work);
        let b = map_seeded(Execution::Parallel, &seeds, work);
        assert_eq!(a, b);
    }
}
