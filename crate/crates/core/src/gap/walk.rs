// SPDX-License-Identifier: Apache-2.0

//! Averaging over the coordinates outside an oracle set by a random walk
//! that never changes the oracles' values.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::coord::CoordinateOracleSet;
use crate::error::{JuntaError, Result};
use crate::estimate::check_unit;
use crate::oracle::RealOracle;
use crate::point::{Point, Sign};
use crate::rng::JuntaRng;

/// Default constant in the chain length `⌈C_W |D| ln(1/δ)/γ²⌉`.
pub const DEFAULT_WALK_CONSTANT: f64 = 8.0;

/// Default ratio of the proposal cap to the chain length.
pub const DEFAULT_PROPOSAL_FACTOR: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WalkConfig {
    /// Per-bit flip probability of a proposal.
    pub flip_prob: f64,
    /// Number of chain states averaged, counting the start.
    pub steps: u64,
    pub gamma: f64,
    pub delta: f64,
    /// Total proposals allowed before the walk reports a liveness error.
    pub proposal_cap: u64,
}

/// `1/(2|D|)`, or `1/2` for an empty set, where every proposal is accepted
/// and the walk samples the cube uniformly.
pub fn flip_probability(oracle_count: usize) -> f64 {
    if oracle_count == 0 {
        0.5
    } else {
        0.5 / oracle_count as f64
    }
}

/// `⌈C_W |D| ln(1/δ)/γ²⌉`, at least 1.
pub fn walk_steps(oracle_count: usize, gamma: f64, delta: f64, c_w: f64) -> u64 {
    let t = c_w * oracle_count.max(1) as f64 * (1.0 / delta).ln() / (gamma * gamma);
    (t.ceil() as u64).max(1)
}

impl WalkConfig {
    pub fn new(oracle_count: usize, gamma: f64, delta: f64, c_w: f64) -> Result<WalkConfig> {
        check_unit("gamma", gamma)?;
        check_unit("delta", delta)?;
        Ok(WalkConfig::with_steps(
            oracle_count,
            walk_steps(oracle_count, gamma, delta, c_w),
            gamma,
            delta,
        ))
    }

    /// A walk of a fixed length; the accuracy fields are carried for reporting.
    pub fn with_steps(oracle_count: usize, steps: u64, gamma: f64, delta: f64) -> WalkConfig {
        let steps = steps.max(1);
        WalkConfig {
            flip_prob: flip_probability(oracle_count),
            steps,
            gamma,
            delta,
            proposal_cap: DEFAULT_PROPOSAL_FACTOR.saturating_mul(steps),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WalkStats {
    pub steps: u64,
    pub proposals: u64,
}

/// Flips each bit of `p` independently with probability `q`.
pub(crate) fn flip_bits(p: &mut Point, q: f64, rng: &mut JuntaRng) {
    if q >= 0.5 {
        p.randomize(rng);
        return;
    }
    for i in 0..p.dimension() {
        if rng.random::<f64>() < q {
            p.flip(i);
        }
    }
}

/// Whether every member agrees with `reference` at `y`.
fn agrees(d: &CoordinateOracleSet, reference: &[Sign], y: &Point, rng: &mut JuntaRng) -> bool {
    d.members()
        .iter()
        .zip(reference)
        .all(|(g, &s)| g.evaluate(y, rng) == s)
}

/// Runs the chain from `x`, calling `visit` on each of the `steps` states.
pub fn walk_chain<F>(
    x: &Point,
    d: &CoordinateOracleSet,
    config: &WalkConfig,
    rng: &mut JuntaRng,
    mut visit: F,
) -> Result<WalkStats>
where
    F: FnMut(&Point, &mut JuntaRng) -> Result<()>,
{
    let reference = d.evaluate_all(x, rng);
    let mut state = x.clone();
    let mut proposal = x.clone();
    let mut proposals = 0u64;
    visit(&state, rng)?;
    for _ in 1..config.steps {
        loop {
            if proposals >= config.proposal_cap {
                return Err(JuntaError::Liveness {
                    stage: "coordinate projection",
                    proposals,
                    cap: config.proposal_cap,
                });
            }
            proposals += 1;
            proposal.clone_from(&state);
            flip_bits(&mut proposal, config.flip_prob, rng);
            if agrees(d, &reference, &proposal, rng) {
                break;
            }
        }
        std::mem::swap(&mut state, &mut proposal);
        visit(&state, rng)?;
    }
    Ok(WalkStats {
        steps: config.steps,
        proposals,
    })
}

/// Estimates `E_y[f(y) | y_S = x_S]` as the mean of `f` over the chain.
pub fn coordinate_projection(
    f: &dyn RealOracle,
    x: &Point,
    d: &CoordinateOracleSet,
    config: &WalkConfig,
    rng: &mut JuntaRng,
) -> Result<f64> {
    if x.dimension() != f.dimension() {
        return Err(JuntaError::argument("point and function disagree on dimension"));
    }
    let mut sum = 0.0;
    walk_chain(x, d, config, rng, |y, rng| {
        sum += f.estimate(y, rng)?;
        Ok(())
    })?;
    Ok(sum / config.steps as f64)
}

/// `f_avg,S` as a real oracle, one chain per evaluation.
#[derive(Clone)]
pub struct ProjectedOracle {
    inner: Arc<dyn RealOracle>,
    oracles: CoordinateOracleSet,
    walk: WalkConfig,
}

impl ProjectedOracle {
    pub fn new(inner: Arc<dyn RealOracle>, oracles: CoordinateOracleSet, walk: WalkConfig) -> Self {
        ProjectedOracle {
            inner,
            oracles,
            walk,
        }
    }

    pub fn walk(&self) -> &WalkConfig {
        &self.walk
    }

    pub fn oracles(&self) -> &CoordinateOracleSet {
        &self.oracles
    }
}

impl RealOracle for ProjectedOracle {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }
    fn estimate(&self, x: &Point, rng: &mut JuntaRng) -> Result<f64> {
        coordinate_projection(self.inner.as_ref(), x, &self.oracles, &self.walk, rng)
    }
    fn accuracy(&self) -> f64 {
        self.inner.accuracy() + self.walk.gamma
    }
    fn failure_probability(&self) -> f64 {
        self.walk.delta + self.walk.steps as f64 * self.inner.failure_probability()
    }
    fn query_cost(&self) -> f64 {
        // About `1/(1 − q)^{|D|} ≤ 2` proposals per step, each evaluating members.
        let per_step = 1.0 / (1.0 - self.walk.flip_prob).powi(self.oracles.len() as i32);
        self.walk.steps as f64 * (self.inner.query_cost() + per_step * self.oracles.query_cost() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{Dictator, Majority, Parity};
    use crate::oracle::BooleanOracle;
    use crate::rng::rng_from_seed;

    #[test]
    fn dictator_projection_is_exact() {
        let mut rng = rng_from_seed(1);
        let f = BooleanOracle::new(Dictator::new(8, 0));
        let d = CoordinateOracleSet::exact(8, &[0]);
        let cfg = WalkConfig::with_steps(1, 200, 0.1, 0.1);
        for _ in 0..10 {
            let x = Point::random(8, &mut rng);
            let v = coordinate_projection(&f, &x, &d, &cfg, &mut rng).unwrap();
            assert_eq!(v, x.get(0).value());
        }
    }

    #[test]
    fn parity_averages_to_zero() {
        let mut rng = rng_from_seed(2);
        let f = BooleanOracle::new(Parity {
            n: 8,
            coords: vec![0, 1],
        });
        let d = CoordinateOracleSet::exact(8, &[0]);
        let cfg = WalkConfig::new(1, 0.1, 0.01, DEFAULT_WALK_CONSTANT).unwrap();
        let v = coordinate_projection(&f, &Point::ones(8), &d, &cfg, &mut rng).unwrap();
        assert!(v.abs() <= 0.1, "{v}");
    }

    #[test]
    fn majority_conditional_mean() {
        let mut rng = rng_from_seed(3);
        let f = BooleanOracle::new(Majority {
            n: 8,
            coords: vec![0, 1, 2],
        });
        let d = CoordinateOracleSet::exact(8, &[0]);
        let cfg = WalkConfig::new(1, 0.05, 0.01, DEFAULT_WALK_CONSTANT).unwrap();
        let v = coordinate_projection(&f, &Point::ones(8), &d, &cfg, &mut rng).unwrap();
        assert!((v - 0.5).abs() <= 0.05, "{v}");
    }

    #[test]
    fn states_keep_the_oracle_coordinates() {
        let mut rng = rng_from_seed(4);
        let d = CoordinateOracleSet::exact(10, &[2, 5]);
        let x = Point::random(10, &mut rng);
        let cfg = WalkConfig::with_steps(2, 500, 0.1, 0.1);
        let stats = walk_chain(&x, &d, &cfg, &mut rng, |y, _| {
            assert_eq!(y.get(2), x.get(2));
            assert_eq!(y.get(5), x.get(5));
            Ok(())
        })
        .unwrap();
        assert!(stats.proposals >= 499);
    }

    #[test]
    fn empty_set_walk_is_uniform_resampling() {
        assert_eq!(flip_probability(0), 0.5);
        assert_eq!(flip_probability(4), 0.125);
        let mut rng = rng_from_seed(5);
        let f = BooleanOracle::new(Dictator::new(6, 3));
        let cfg = WalkConfig::new(0, 0.05, 0.01, DEFAULT_WALK_CONSTANT).unwrap();
        let d = CoordinateOracleSet::empty(0.0, 1);
        let v = coordinate_projection(&f, &Point::ones(6), &d, &cfg, &mut rng).unwrap();
        assert!(v.abs() <= 0.05, "{v}");
    }

    #[test]
    fn step_formula() {
        assert_eq!(walk_steps(2, 0.5, 0.5, 8.0), 45);
        assert_eq!(walk_steps(0, 0.5, 0.5, 8.0), 23);
    }
}
