// SPDX-License-Identifier: Apache-2.0

//! Correlation with juntas up to a gap in arity, with queries polynomial in
//! `k` and `1/ε`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coord::construct::ConstructionStats;
use crate::coord::{construct_coordinate_oracle, ConstructionConfig, ConstructionParams, Verdict};
use crate::error::{JuntaError, Result};
use crate::estimate::{check_unit, hoeffding_samples};
use crate::full_tester::{tolerance_threshold, TolerantDecision, TESTER_DELTA};
use crate::oracle::{BooleanOracle, RealOracle};
use crate::par::{map_seeded, Execution};
use crate::point::Point;
use crate::rng::{child_seeds, JuntaRng};

use super::influence::{
    threshold_influences, threshold_points, ThresholdConfig, DEFAULT_COUPON_FACTOR,
    DEFAULT_INFLUENCE_CONSTANT,
};
use super::smooth::SmoothedOracle;
use super::walk::{walk_steps, ProjectedOracle, WalkConfig, DEFAULT_PROPOSAL_FACTOR, DEFAULT_WALK_CONSTANT};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GapTesterConfig {
    pub construction: ConstructionConfig,
    /// Closeness of the coordinate oracles. Defaults to `min(γ, 1/8)`.
    pub nu: Option<f64>,
    /// Base accuracy. Defaults to `ε/16`.
    pub gamma: Option<f64>,
    pub c_w: f64,
    pub c_i: f64,
    pub proposal_factor: u64,
    pub coupon_factor: f64,
    /// Chain length for `f_avg`.
    pub average_steps: Option<u64>,
    /// Samples per `f_smooth` evaluation.
    pub smoothing_samples: Option<u64>,
    /// Base points for influence thresholding.
    pub influence_points: Option<u64>,
    /// Chain length for the projection onto the kept oracles.
    pub final_steps: Option<u64>,
    /// Points in the final mean of `|f_smooth,avg|`.
    pub final_samples: Option<u64>,
    pub execution: Execution,
}

impl Default for GapTesterConfig {
    fn default() -> Self {
        GapTesterConfig {
            construction: ConstructionConfig::default(),
            nu: None,
            gamma: None,
            c_w: DEFAULT_WALK_CONSTANT,
            c_i: DEFAULT_INFLUENCE_CONSTANT,
            proposal_factor: DEFAULT_PROPOSAL_FACTOR,
            coupon_factor: DEFAULT_COUPON_FACTOR,
            average_steps: None,
            smoothing_samples: None,
            influence_points: None,
            final_steps: None,
            final_samples: None,
            execution: Execution::default(),
        }
    }
}

/// Per-stage counts of the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GapCounts {
    pub average_steps: u64,
    pub smoothing_samples: u64,
    pub influence_points: u64,
    pub final_steps: u64,
    pub final_samples: u64,
}

impl GapCounts {
    /// Estimation calls made by the pipeline: final projections, smoothing
    /// calls, averaging chains, and one thresholding pass.
    pub fn calls(&self, oracle_count: usize) -> u64 {
        let thresholding = if oracle_count == 0 {
            0
        } else {
            self.influence_points * (oracle_count as u64 + 1)
        };
        let smooth = self.final_samples * self.final_steps + thresholding;
        self.final_samples + smooth + smooth * self.smoothing_samples + u64::from(oracle_count > 0)
    }
}

/// Counts at per-call confidence `delta`. `final_steps` is planned for the
/// full oracle set; the realized chain uses the kept set's size.
pub fn gap_counts(
    oracle_count: usize,
    t: f64,
    gamma: f64,
    delta: f64,
    config: &GapTesterConfig,
) -> GapCounts {
    GapCounts {
        average_steps: config
            .average_steps
            .unwrap_or_else(|| walk_steps(oracle_count, gamma, delta, config.c_w)),
        smoothing_samples: config
            .smoothing_samples
            .unwrap_or_else(|| hoeffding_samples(gamma, delta)),
        influence_points: config
            .influence_points
            .unwrap_or_else(|| threshold_points(oracle_count, t, delta, config.c_i)),
        final_steps: config
            .final_steps
            .unwrap_or_else(|| walk_steps(oracle_count, gamma, delta, config.c_w)),
        final_samples: config
            .final_samples
            .unwrap_or_else(|| hoeffding_samples(gamma, delta)),
    }
}

/// Per-call confidence `δ/calls`, with the call count evaluated once at
/// `δ` and once more at the resulting per-call value.
pub fn per_call_delta(
    oracle_count: usize,
    t: f64,
    gamma: f64,
    delta: f64,
    config: &GapTesterConfig,
) -> (f64, GapCounts) {
    let first = gap_counts(oracle_count, t, gamma, delta, config).calls(oracle_count);
    let call_delta = delta / first.max(1) as f64;
    let counts = gap_counts(oracle_count, t, gamma, call_delta, config);
    let call_delta = delta / counts.calls(oracle_count).max(1) as f64;
    (call_delta, counts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapParams {
    pub k: usize,
    pub epsilon: f64,
    pub tau: f64,
    pub delta: f64,
    pub nu: f64,
    pub gamma: f64,
    /// Noise rate of the smoothing step, `ε/(2k)`.
    pub smoothing: f64,
    /// Influence threshold `ε/k`.
    pub threshold: f64,
    /// `min(⌈k²/ε²⌉, n)`.
    pub k_prime: usize,
    pub oracle_count: usize,
    pub kept_count: usize,
    pub per_call_delta: f64,
    pub planned_calls: u64,
    pub counts: GapCounts,
    /// Realized length of the final chain.
    pub realized_final_steps: u64,
    pub construction: ConstructionParams,
    pub construction_stats: ConstructionStats,
}

#[derive(Clone, Debug)]
pub struct GapOutput {
    pub estimate: f64,
    /// Positions in the constructed set of the members kept by thresholding.
    pub kept: Vec<usize>,
    pub influence_estimates: Vec<f64>,
    pub params: GapParams,
    pub query_total: u64,
}

/// `min(⌈k²/ε²⌉, n)`.
pub fn gap_arity(k: usize, epsilon: f64, n: usize) -> usize {
    let kp = ((k * k) as f64 / (epsilon * epsilon)).ceil() as usize;
    kp.min(n)
}

pub fn maximum_correlation_gap_junta(
    f: &BooleanOracle,
    k: usize,
    epsilon: f64,
    config: &GapTesterConfig,
    rng: &mut JuntaRng,
) -> Result<GapOutput> {
    check_unit("epsilon", epsilon)?;
    if k == 0 {
        return Err(JuntaError::argument("k must be at least 1"));
    }
    let start = f.query_count();
    let n = f.dimension();
    let delta = TESTER_DELTA;
    let tau = epsilon / 4.0;
    let gamma = config.gamma.unwrap_or(epsilon / 16.0);
    check_unit("gamma", gamma)?;
    let nu = config.nu.unwrap_or(gamma.min(0.125));
    let s = epsilon / (2.0 * k as f64);
    let t = epsilon / k as f64;
    check_unit("smoothing noise", s)?;
    check_unit("influence threshold", t)?;

    let built = construct_coordinate_oracle(f, k, delta / 2.0, nu, tau, &config.construction, rng)?;
    let d = built.oracles;
    let (call_delta, counts) = per_call_delta(d.len(), t, gamma, delta / 2.0, config);
    let planned_calls = counts.calls(d.len());

    let average = |steps: u64, size: usize| {
        let mut w = WalkConfig::with_steps(size, steps, gamma, call_delta);
        w.proposal_cap = config.proposal_factor.saturating_mul(w.steps);
        w
    };
    let f_avg = ProjectedOracle::new(
        Arc::new(f.clone()),
        d.clone(),
        average(counts.average_steps, d.len()),
    );
    let f_smooth: Arc<dyn RealOracle> = Arc::new(SmoothedOracle::with_samples(
        Arc::new(f_avg),
        s,
        counts.smoothing_samples,
        gamma,
        call_delta,
    )?);

    let threshold_cfg = ThresholdConfig {
        c_i: config.c_i,
        points: Some(counts.influence_points),
        coupon_factor: config.coupon_factor,
        execution: config.execution,
    };
    let thresholded = threshold_influences(f_smooth.as_ref(), &d, t, call_delta, &threshold_cfg, rng)?;
    let kept = thresholded.kept;

    let final_steps = config
        .final_steps
        .unwrap_or_else(|| walk_steps(kept.len(), gamma, call_delta, config.c_w));
    let f_final = ProjectedOracle::new(f_smooth, kept.clone(), average(final_steps, kept.len()));
    let seeds = child_seeds(rng, counts.final_samples as usize);
    let values = map_seeded(config.execution, &seeds, |_, rng| -> Result<f64> {
        let x = Point::random(n, rng);
        Ok(f_final.estimate(&x, rng)?.abs())
    });
    let mut sum = 0.0;
    for v in values {
        sum += v?;
    }
    let estimate = sum / counts.final_samples.max(1) as f64;

    Ok(GapOutput {
        estimate,
        kept: thresholded.indices,
        influence_estimates: thresholded.estimates,
        params: GapParams {
            k,
            epsilon,
            tau,
            delta,
            nu,
            gamma,
            smoothing: s,
            threshold: t,
            k_prime: gap_arity(k, epsilon, n),
            oracle_count: d.len(),
            kept_count: kept.len(),
            per_call_delta: call_delta,
            planned_calls,
            counts,
            realized_final_steps: f_final.walk().steps,
            construction: built.params,
            construction_stats: built.stats,
        },
        query_total: f.query_count() - start,
    })
}

/// Accepts iff the gap estimate at `ε = (c_u − c_ℓ)/2` is at least
/// `1 − 2c_ℓ − 2ε`.
pub fn gap_tolerant_test(
    f: &BooleanOracle,
    k: usize,
    c_u: f64,
    c_l: f64,
    config: &GapTesterConfig,
    rng: &mut JuntaRng,
) -> Result<TolerantDecision<GapOutput>> {
    let (eps, thr) = tolerance_threshold(c_u, c_l)?;
    let out = maximum_correlation_gap_junta(f, k, eps, config, rng)?;
    let verdict = if out.estimate >= thr {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    Ok(TolerantDecision {
        verdict,
        epsilon: eps,
        threshold: thr,
        estimate: out.estimate,
        output: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::Constant;
    use crate::point::Sign;
    use crate::rng::rng_from_seed;

    #[test]
    fn call_count_composition() {
        let c = GapCounts {
            average_steps: 2,
            smoothing_samples: 3,
            influence_points: 4,
            final_steps: 5,
            final_samples: 6,
        };
        // 6 final + (30 + 4·3) smooth + 42·3 averaging + 1 threshold.
        assert_eq!(c.calls(2), 6 + 42 + 126 + 1);
        assert_eq!(c.calls(0), 6 + 30 + 90);
    }

    #[test]
    fn per_call_delta_is_split() {
        let cfg = GapTesterConfig {
            average_steps: Some(2),
            smoothing_samples: Some(2),
            influence_points: Some(4),
            final_steps: Some(2),
            final_samples: Some(16),
            ..GapTesterConfig::default()
        };
        let (d, counts) = per_call_delta(1, 0.25, 0.0156, 1.0 / 6.0, &cfg);
        assert!((d * counts.calls(1) as f64 - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn arity_is_capped() {
        assert_eq!(gap_arity(1, 0.25, 32), 16);
        assert_eq!(gap_arity(2, 0.25, 12), 12);
    }

    #[test]
    fn constant_gives_its_absolute_mean() {
        let mut rng = rng_from_seed(9);
        let f = BooleanOracle::new(Constant {
            n: 8,
            value: Sign::Plus,
        });
        let cfg = GapTesterConfig {
            construction: ConstructionConfig {
                outer_loops: Some(2),
                inner_loops: Some(2),
                kappa: Some(1.0),
                hastad_gamma: Some(0.25),
                per_call_delta: Some(0.01),
                ..ConstructionConfig::default()
            },
            average_steps: Some(2),
            smoothing_samples: Some(2),
            final_steps: Some(2),
            final_samples: Some(8),
            ..GapTesterConfig::default()
        };
        let out = maximum_correlation_gap_junta(&f, 1, 0.25, &cfg, &mut rng).unwrap();
        assert_eq!(out.params.oracle_count, 0);
        assert_eq!(out.estimate, 1.0);
    }
}
