// SPDX-License-Identifier: Apache-2.0

//! Best junta over a coordinate-oracle set by Poissonized bucket averaging.
//!
//! One shared set of `N′ ∼ Poisson(N)` uniform points is labelled by `f` and
//! by every oracle. For each `k`-subset `T` of oracles the points fall into
//! `2^k` buckets by their oracle values. Bucket sums are divided by the
//! fixed `M = N·2^{-k}`, not by the realized bucket sizes.

use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::coord::CoordinateOracleSet;
use crate::error::{JuntaError, Result};
use crate::estimate::check_unit;
use crate::oracle::BooleanOracle;
use crate::par::{map_range, map_seeded, Execution};
use crate::point::{Point, Sign};
use crate::rng::{child_seeds, JuntaRng};
use crate::table::TruthTable;

pub const DEFAULT_WORK_CAP: u64 = 1 << 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BestFitConfig {
    /// Replaces the sample target `N`.
    pub samples: Option<u64>,
    /// Replaces the per-evaluation failure budget `δ/(4N|D|)`.
    pub eval_delta: Option<f64>,
    /// Cap on `C(|D|, k)·N′·k` bucket updates.
    pub work_cap: u64,
    pub execution: Execution,
}

impl Default for BestFitConfig {
    fn default() -> Self {
        BestFitConfig {
            samples: None,
            eval_delta: None,
            work_cap: DEFAULT_WORK_CAP,
            execution: Execution::Sequential,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BestFitParams {
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub oracle_count: usize,
    pub target_samples: u64,
    pub realized_samples: u64,
    pub divisor: f64,
    pub eval_delta: f64,
    pub subsets_scanned: u64,
}

#[derive(Clone, Debug)]
pub struct BestFitResult {
    pub corr_estimate: f64,
    /// Sign of each winning bucket; entry `y` has bit `j` set when the
    /// `j`-th chosen oracle reads −1.
    pub h: TruthTable,
    /// Indices into the oracle set.
    pub chosen: Vec<usize>,
    pub params: BestFitParams,
}

/// `⌈2^k ε⁻² · 4 · (|D| + ln(1/δ) + k²)⌉`.
pub fn best_fit_samples(k: usize, oracle_count: usize, epsilon: f64, delta: f64) -> u64 {
    let kf = k as f64;
    (2f64.powi(k as i32) / (epsilon * epsilon)
        * 4.0
        * (oracle_count as f64 + (1.0 / delta).ln() + kf * kf))
        .ceil() as u64
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul((n - i) as u64) / (i as u64 + 1))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Bucket sums of `f` for one subset of oracles.
#[derive(Clone, Debug, PartialEq)]
pub struct BucketTable {
    pub sums: Vec<i64>,
    pub counts: Vec<u64>,
    pub divisor: f64,
}

impl BucketTable {
    /// Builds the table from labels: `f_values[p]` is `f` at point `p` and
    /// bit `p` of `oracle_bits[j]` is set when oracle `subset[j]` reads −1.
    pub fn build(f_values: &[Sign], oracle_bits: &[Vec<u64>], subset: &[usize], divisor: f64) -> Self {
        let k = subset.len();
        let mut sums = vec![0i64; 1 << k];
        let mut counts = vec![0u64; 1 << k];
        for (p, v) in f_values.iter().enumerate() {
            let (w, b) = (p / 64, p % 64);
            let mut y = 0usize;
            for (j, &o) in subset.iter().enumerate() {
                y |= (((oracle_bits[o][w] >> b) & 1) as usize) << j;
            }
            sums[y] += v.as_i8() as i64;
            counts[y] += 1;
        }
        BucketTable {
            sums,
            counts,
            divisor,
        }
    }

    /// `Corr̂_{T,y}` for every bucket `y`.
    pub fn estimates(&self) -> Vec<f64> {
        self.sums.iter().map(|&s| s as f64 / self.divisor).collect()
    }

    /// `Corr̂_T = 2^{-k} Σ_y |Corr̂_{T,y}|`.
    pub fn correlation(&self) -> f64 {
        let total: f64 = self.estimates().iter().map(|e| e.abs()).sum();
        total / self.sums.len() as f64
    }
}

pub fn find_best_fit(
    f: &BooleanOracle,
    oracles: &CoordinateOracleSet,
    k: usize,
    epsilon: f64,
    delta: f64,
    config: &BestFitConfig,
    rng: &mut JuntaRng,
) -> Result<BestFitResult> {
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    let d = oracles.len();
    if d < k {
        return Err(JuntaError::argument(format!(
            "need at least k = {k} oracles, have {d}"
        )));
    }
    let n = f.dimension();
    let target = config
        .samples
        .unwrap_or_else(|| best_fit_samples(k, d, epsilon, delta))
        .max(1);
    let realized = Poisson::new(target as f64)
        .map_err(|e| JuntaError::argument(e.to_string()))?
        .sample(rng) as u64;
    let divisor = target as f64 / 2f64.powi(k as i32);
    let eval_delta = config
        .eval_delta
        .unwrap_or(delta / (4.0 * target as f64 * d.max(1) as f64));
    let subset_count = binomial(d, k);
    let work = subset_count
        .saturating_mul(realized)
        .saturating_mul(k.max(1) as u64);
    if work > config.work_cap {
        return Err(JuntaError::Budget {
            stage: "find_best_fit",
            detail: format!("C({d},{k}) = {subset_count} subsets over {realized} points"),
            budget: config.work_cap,
        });
    }

    let points: Vec<Point> = (0..realized).map(|_| Point::random(n, rng)).collect();
    let f_values: Vec<Sign> = {
        let mut t = f.tally();
        points.iter().map(|x| t.query(x)).collect()
    };
    let words = points.len().div_ceil(64).max(1);
    let seeds = child_seeds(rng, d);
    let oracle_bits: Vec<Vec<u64>> = map_seeded(config.execution, &seeds, |j, rng| {
        let g = oracles.get(j);
        let mut bits = vec![0u64; words];
        for (p, x) in points.iter().enumerate() {
            if g.evaluate_with_confidence(x, eval_delta, rng).is_minus() {
                bits[p / 64] |= 1 << (p % 64);
            }
        }
        bits
    });

    let all = subsets(d, k);
    let scores = map_range(config.execution, all.len(), |i| {
        BucketTable::build(&f_values, &oracle_bits, &all[i], divisor).correlation()
    });
    let mut best = 0usize;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    let table = BucketTable::build(&f_values, &oracle_bits, &all[best], divisor);
    let h = TruthTable::from_fn(k, |y| Sign::of(table.sums[y as usize] as f64))?;
    Ok(BestFitResult {
        corr_estimate: scores[best],
        h,
        chosen: all[best].clone(),
        params: BestFitParams {
            k,
            epsilon,
            delta,
            oracle_count: d,
            target_samples: target,
            realized_samples: realized,
            divisor,
            eval_delta,
            subsets_scanned: all.len() as u64,
        },
    })
}
