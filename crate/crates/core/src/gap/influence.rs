// SPDX-License-Identifier: Apache-2.0

//! Influence estimates for coordinates known only through oracles.

use serde::{Deserialize, Serialize};

use crate::coord::CoordinateOracleSet;
use crate::error::{JuntaError, Result};
use crate::estimate::check_unit;
use crate::oracle::RealOracle;
use crate::par::{map_seeded, Execution};
use crate::point::{Point, Sign};
use crate::rng::{child_seeds, JuntaRng};

use super::walk::{flip_bits, flip_probability};

/// Default constant in `T = ⌈C_I t⁻² ln(|D|/δ)⌉`.
pub const DEFAULT_INFLUENCE_CONSTANT: f64 = 4.0;

/// Default ratio of the proposal cap to the coupon-collector expectation.
pub const DEFAULT_COUPON_FACTOR: f64 = 16.0;

/// One point per member, each leaving every other member's value unchanged.
#[derive(Clone, Debug)]
pub struct InfluenceSample {
    pub base: Point,
    /// `flipped[j]` is the point at which only member `j` changes value.
    pub flipped: Vec<Point>,
    pub proposals: u64,
}

/// `H_d / (q(1−q)^{d−1})` with `q = 1/(2d)`: expected proposals until every
/// member has been isolated once, when members track distinct coordinates.
pub fn coupon_expectation(d: usize) -> f64 {
    if d == 0 {
        return 0.0;
    }
    let q = flip_probability(d);
    let harmonic: f64 = (1..=d).map(|j| 1.0 / j as f64).sum();
    harmonic / (q * (1.0 - q).powi(d as i32 - 1))
}

pub fn influence_testing_sample(
    x: &Point,
    d: &CoordinateOracleSet,
    coupon_factor: f64,
    rng: &mut JuntaRng,
) -> Result<InfluenceSample> {
    if d.is_empty() {
        return Err(JuntaError::argument("influence-testing sample needs a nonempty oracle set"));
    }
    let m = d.len();
    let q = flip_probability(m);
    let cap = (coupon_factor * coupon_expectation(m)).ceil() as u64;
    let reference = d.evaluate_all(x, rng);
    let mut flipped: Vec<Option<Point>> = vec![None; m];
    let mut found = 0;
    let mut proposals = 0u64;
    let mut y = x.clone();
    while found < m {
        if proposals >= cap {
            return Err(JuntaError::Liveness {
                stage: "influence-testing sample",
                proposals,
                cap,
            });
        }
        proposals += 1;
        y.clone_from(x);
        flip_bits(&mut y, q, rng);
        if let Some(j) = single_disagreement(d, &reference, &y, rng) {
            if flipped[j].is_none() {
                flipped[j] = Some(y.clone());
                found += 1;
            }
        }
    }
    Ok(InfluenceSample {
        base: x.clone(),
        flipped: flipped.into_iter().map(|p| p.expect("all found")).collect(),
        proposals,
    })
}

/// The unique member whose value at `y` differs from `reference`, if any.
fn single_disagreement(
    d: &CoordinateOracleSet,
    reference: &[Sign],
    y: &Point,
    rng: &mut JuntaRng,
) -> Option<usize> {
    let mut hit = None;
    for (j, (g, &s)) in d.members().iter().zip(reference).enumerate() {
        if g.evaluate(y, rng) != s {
            if hit.is_some() {
                return None;
            }
            hit = Some(j);
        }
    }
    hit
}

#[derive(Clone, Debug)]
pub struct ThresholdOutcome {
    pub kept: CoordinateOracleSet,
    /// Positions in the input set of the kept members.
    pub indices: Vec<usize>,
    /// `Înf_g` for every input member.
    pub estimates: Vec<f64>,
    pub base_points: u64,
    pub proposals: u64,
}

/// `⌈C_I t⁻² ln(|D|/δ)⌉`, at least 1.
pub fn threshold_points(oracle_count: usize, t: f64, delta: f64, c_i: f64) -> u64 {
    let t = c_i * (oracle_count.max(1) as f64 / delta).ln() / (t * t);
    (t.ceil() as u64).max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdConfig {
    pub c_i: f64,
    /// Overrides the base-point count.
    pub points: Option<u64>,
    pub coupon_factor: f64,
    pub execution: Execution,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            c_i: DEFAULT_INFLUENCE_CONSTANT,
            points: None,
            coupon_factor: DEFAULT_COUPON_FACTOR,
            execution: Execution::default(),
        }
    }
}

/// Keeps the members whose estimated influence
/// `(1/(4T)) Σ (f(x) − f(y_g))²` is at least `3t/2`.
pub fn threshold_influences(
    f: &dyn RealOracle,
    d: &CoordinateOracleSet,
    t: f64,
    delta: f64,
    config: &ThresholdConfig,
    rng: &mut JuntaRng,
) -> Result<ThresholdOutcome> {
    check_unit("t", t)?;
    check_unit("delta", delta)?;
    if d.is_empty() {
        return Ok(ThresholdOutcome {
            kept: d.clone(),
            indices: Vec::new(),
            estimates: Vec::new(),
            base_points: 0,
            proposals: 0,
        });
    }
    let points = config
        .points
        .unwrap_or_else(|| threshold_points(d.len(), t, delta, config.c_i))
        .max(1);
    let n = f.dimension();
    let seeds = child_seeds(rng, points as usize);
    let rows = map_seeded(config.execution, &seeds, |_, rng| -> Result<(Vec<f64>, u64)> {
        let x = Point::random(n, rng);
        let sample = influence_testing_sample(&x, d, config.coupon_factor, rng)?;
        let fx = f.estimate(&x, rng)?;
        let mut sq = Vec::with_capacity(d.len());
        for y in &sample.flipped {
            let diff = fx - f.estimate(y, rng)?;
            sq.push(diff * diff);
        }
        Ok((sq, sample.proposals))
    });
    let mut sums = vec![0.0; d.len()];
    let mut proposals = 0;
    for row in rows {
        let (sq, p) = row?;
        proposals += p;
        for (s, v) in sums.iter_mut().zip(sq) {
            *s += v;
        }
    }
    let estimates: Vec<f64> = sums.iter().map(|s| s / (4.0 * points as f64)).collect();
    let indices: Vec<usize> = (0..d.len())
        .filter(|&j| estimates[j] >= 1.5 * t)
        .collect();
    Ok(ThresholdOutcome {
        kept: d.subset(&indices),
        indices,
        estimates,
        base_points: points,
        proposals,
    })
}
