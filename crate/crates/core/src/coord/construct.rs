// SPDX-License-Identifier: Apache-2.0

//! Building coordinate-oracle sets from restrictions, noise draws and the
//! dictator test, followed by a correlation-based dedup pass.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::candidate::{
    estimate_restricted_mean, CandidateDictator, CandidateSettings, CoordinateOracle, ExactDictator,
};
use super::dictator_test::{dictator_test, round_counts, DictatorTestConfig, RoundCounts};
use super::hastad::{eta_probability, eta_scale, sample_eta};
use crate::error::{JuntaError, Result};
use crate::estimate::{check_unit, hoeffding_samples};
use crate::oracle::BooleanOracle;
use crate::par::{map_seeded, Execution};
use crate::point::{Point, Sign};
use crate::restriction::Restriction;
use crate::rng::{child_seeds, JuntaRng};

/// A collection of coordinate oracles with the closeness parameter it was
/// built for.
#[derive(Clone, Debug)]
pub struct CoordinateOracleSet {
    members: Vec<Arc<dyn CoordinateOracle>>,
    nu: f64,
    k: usize,
}

impl CoordinateOracleSet {
    pub fn new(members: Vec<Arc<dyn CoordinateOracle>>, nu: f64, k: usize) -> Self {
        CoordinateOracleSet { members, nu, k }
    }

    pub fn empty(nu: f64, k: usize) -> Self {
        CoordinateOracleSet::new(Vec::new(), nu, k)
    }

    /// Exact dictators on the given coordinates.
    pub fn exact(n: usize, coords: &[usize]) -> Self {
        let members = coords
            .iter()
            .map(|&c| Arc::new(ExactDictator::new(n, c)) as Arc<dyn CoordinateOracle>)
            .collect();
        CoordinateOracleSet::new(members, 0.0, coords.len())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn members(&self) -> &[Arc<dyn CoordinateOracle>] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &dyn CoordinateOracle {
        self.members[i].as_ref()
    }

    /// The members at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> CoordinateOracleSet {
        let members = indices.iter().map(|&i| Arc::clone(&self.members[i])).collect();
        CoordinateOracleSet::new(members, self.nu, self.k)
    }

    pub fn evaluate_all(&self, x: &Point, rng: &mut JuntaRng) -> Vec<Sign> {
        self.members.iter().map(|g| g.evaluate(x, rng)).collect()
    }

    /// Query cost of evaluating every member once.
    pub fn query_cost(&self) -> u64 {
        self.members.iter().map(|g| g.query_cost()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstructionConfig {
    pub c_t: f64,
    pub c_m: f64,
    pub c_n: f64,
    /// Håstad accuracy is `multiplier · ακ³/64`; the default 4 gives `ακ³/16`.
    pub hastad_accuracy_multiplier: f64,
    pub hastad_gamma: Option<f64>,
    /// Per-evaluation failure probability of each candidate. Defaults to
    /// `δ̃` divided by the most evaluations one dictator test can make.
    pub per_call_delta: Option<f64>,
    pub kappa: Option<f64>,
    pub outer_loops: Option<u64>,
    pub inner_loops: Option<u64>,
    pub dedup_points: Option<u64>,
    pub dictator: DictatorTestConfig,
    /// Largest permitted number of candidates `T·M`.
    pub max_candidates: u64,
    pub execution: Execution,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        ConstructionConfig {
            c_t: 4.0,
            c_m: 4.0,
            c_n: 4.0,
            hastad_accuracy_multiplier: 4.0,
            hastad_gamma: None,
            per_call_delta: None,
            kappa: None,
            outer_loops: None,
            inner_loops: None,
            dedup_points: None,
            dictator: DictatorTestConfig::default(),
            max_candidates: 1 << 20,
            execution: Execution::Sequential,
        }
    }
}

/// Realized construction parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionParams {
    pub k: usize,
    pub delta: f64,
    pub nu: f64,
    pub tau: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub eta_probability: f64,
    pub outer_loops: u64,
    pub inner_loops: u64,
    pub tilde_delta: f64,
    pub dedup_points: u64,
    pub hastad_gamma: f64,
    pub per_call_delta: f64,
    pub samples_per_call: u64,
    pub dictator_rounds: RoundCounts,
}

impl ConstructionParams {
    pub fn candidate_settings(&self) -> CandidateSettings {
        CandidateSettings {
            kappa: self.kappa,
            gamma: self.hastad_gamma,
            per_call_delta: self.per_call_delta,
        }
    }
}

/// Derives every loop count and accuracy, failing if `T·M` exceeds the budget.
pub fn construction_params(
    k: usize,
    delta: f64,
    nu: f64,
    tau: f64,
    config: &ConstructionConfig,
) -> Result<ConstructionParams> {
    if k == 0 {
        return Err(JuntaError::argument("k must be at least 1"));
    }
    check_unit("delta", delta)?;
    check_unit("tau", tau)?;
    if !(nu > 0.0 && nu <= 0.125) {
        return Err(JuntaError::argument(format!("nu must lie in (0, 1/8], got {nu}")));
    }
    let kf = k as f64;
    let log_inv = (1.0 / delta).ln();
    let outer = config
        .outer_loops
        .unwrap_or_else(|| (config.c_t * kf.powi(5) * tau.powi(-5) * log_inv).ceil() as u64)
        .max(1);
    let inner = config
        .inner_loops
        .unwrap_or_else(|| (config.c_m * kf.powi(7) * tau.powi(-7) * log_inv).ceil() as u64)
        .max(1);
    let candidates = outer.saturating_mul(inner);
    if candidates > config.max_candidates {
        return Err(JuntaError::Budget {
            stage: "construct_coordinate_oracle",
            detail: format!("T = {outer}, M = {inner}, T·M = {candidates}"),
            budget: config.max_candidates,
        });
    }
    let tilde_delta = delta / candidates as f64;
    let dedup = config
        .dedup_points
        .unwrap_or_else(|| (config.c_n * (candidates as f64 / delta).ln()).ceil() as u64)
        .max(1);
    let kappa = config.kappa.unwrap_or(tau / (4.0 * kf));
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(JuntaError::argument(format!("kappa must lie in (0, 1], got {kappa}")));
    }
    let alpha = eta_scale(kappa);
    let hastad_gamma = config
        .hastad_gamma
        .unwrap_or(config.hastad_accuracy_multiplier * alpha * kappa.powi(3) / 64.0);
    check_unit("hastad_gamma", hastad_gamma)?;
    let rounds = round_counts(nu, tilde_delta, &config.dictator);
    let per_call_delta = config
        .per_call_delta
        .unwrap_or(tilde_delta / rounds.max_evaluations() as f64);
    check_unit("per_call_delta", per_call_delta)?;
    Ok(ConstructionParams {
        k,
        delta,
        nu,
        tau,
        kappa,
        alpha,
        eta_probability: eta_probability(kappa),
        outer_loops: outer,
        inner_loops: inner,
        tilde_delta,
        dedup_points: dedup,
        hastad_gamma,
        per_call_delta,
        samples_per_call: hoeffding_samples(hastad_gamma, per_call_delta),
        dictator_rounds: rounds,
    })
}

/// Counts gathered while constructing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConstructionStats {
    pub candidates_tested: u64,
    pub accepted: u64,
    pub removed_as_duplicates: u64,
    pub mean_queries: u64,
    pub dictator_test_evaluations: u64,
    pub dictator_test_queries: u64,
    pub dedup_queries: u64,
    /// Sum of the declared costs of every sub-procedure.
    pub declared_queries: u64,
    /// Change in the oracle's counter over the run.
    pub observed_queries: u64,
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub oracles: CoordinateOracleSet,
    pub params: ConstructionParams,
    pub stats: ConstructionStats,
}

/// Indices kept by the dedup pass: scanning in order, a member is dropped
/// when its empirical correlation with an already kept member has magnitude
/// at least 1/2.
pub fn dedup_by_correlation(values: &[Vec<Sign>]) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for (i, row) in values.iter().enumerate() {
        let clash = kept.iter().any(|&j| {
            let agree = row
                .iter()
                .zip(values[j].iter())
                .filter(|(a, b)| a == b)
                .count() as f64;
            let n = row.len() as f64;
            ((2.0 * agree - n) / n).abs() >= 0.5
        });
        if !clash {
            kept.push(i);
        }
    }
    kept
}

struct RestrictionOutcome {
    accepted: Vec<CandidateDictator>,
    evaluations: u64,
    queries: u64,
}

pub fn construct_coordinate_oracle(
    f: &BooleanOracle,
    k: usize,
    delta: f64,
    nu: f64,
    tau: f64,
    config: &ConstructionConfig,
    rng: &mut JuntaRng,
) -> Result<Construction> {
    let params = construction_params(k, delta, nu, tau, config)?;
    let n = f.dimension();
    let start = f.query_count();
    let settings = params.candidate_settings();
    let mean_cost = hoeffding_samples(settings.gamma, settings.per_call_delta);

    let seeds = child_seeds(rng, params.outer_loops as usize);
    let outcomes = map_seeded(config.execution, &seeds, |_, rng| -> Result<RestrictionOutcome> {
        let rho = Restriction::sample(1.0 / k as f64, n, rng)?;
        let lifted = rho.lift(f)?;
        let mean = estimate_restricted_mean(&lifted, settings.gamma, settings.per_call_delta, rng)?;
        let mut out = RestrictionOutcome {
            accepted: Vec::new(),
            evaluations: 0,
            queries: 0,
        };
        for _ in 0..params.inner_loops {
            let eta = sample_eta(params.kappa, n, rng)?;
            let g = CandidateDictator::with_mean(f, &rho, &eta, settings, mean)?;
            let report = dictator_test(&g, nu, params.tilde_delta, &config.dictator, rng)?;
            out.evaluations += report.evaluations;
            out.queries += report.evaluations * g.query_cost();
            if report.verdict.accepted() {
                out.accepted.push(g);
            }
        }
        Ok(out)
    });

    let mut stats = ConstructionStats {
        candidates_tested: params.outer_loops * params.inner_loops,
        mean_queries: params.outer_loops * mean_cost,
        ..Default::default()
    };
    let mut pool: Vec<Arc<dyn CoordinateOracle>> = Vec::new();
    for o in outcomes {
        let o = o?;
        stats.dictator_test_evaluations += o.evaluations;
        stats.dictator_test_queries += o.queries;
        pool.extend(
            o.accepted
                .into_iter()
                .map(|g| Arc::new(g) as Arc<dyn CoordinateOracle>),
        );
    }
    stats.accepted = pool.len() as u64;

    let kept = if pool.len() > 1 {
        let points: Vec<Point> = (0..params.dedup_points)
            .map(|_| Point::random(n, rng))
            .collect();
        let seeds = child_seeds(rng, pool.len());
        let values = map_seeded(config.execution, &seeds, |i, rng| {
            points
                .iter()
                .map(|x| pool[i].evaluate(x, rng))
                .collect::<Vec<Sign>>()
        });
        stats.dedup_queries = pool.iter().map(|g| g.query_cost()).sum::<u64>() * params.dedup_points;
        dedup_by_correlation(&values)
    } else {
        (0..pool.len()).collect()
    };
    stats.removed_as_duplicates = (pool.len() - kept.len()) as u64;
    let members = kept.iter().map(|&i| Arc::clone(&pool[i])).collect();

    stats.declared_queries = stats.mean_queries + stats.dictator_test_queries + stats.dedup_queries;
    stats.observed_queries = f.query_count() - start;
    Ok(Construction {
        oracles: CoordinateOracleSet::new(members, nu, k),
        params,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{Constant, Dictator};
    use crate::rng::rng_from_seed;

    fn desk() -> ConstructionConfig {
        ConstructionConfig {
            kappa: Some(1.0),
            hastad_gamma: Some(1.0 / 32.0),
            per_call_delta: Some(1e-3),
            outer_loops: Some(2),
            inner_loops: Some(32),
            dedup_points: Some(32),
            dictator: DictatorTestConfig {
                linearity_constant: 0.25,
                pair_constant: 2.0,
                noise_constant: 8.0,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn loop_counts_follow_the_formulas() {
        let cfg = ConstructionConfig {
            max_candidates: u64::MAX,
            ..Default::default()
        };
        let p = construction_params(2, 0.1, 0.125, 0.5, &cfg).unwrap();
        let l = 10f64.ln();
        assert_eq!(p.outer_loops, (4.0 * 32.0 * 32.0 * l).ceil() as u64);
        assert_eq!(p.inner_loops, (4.0 * 128.0 * 128.0 * l).ceil() as u64);
        assert!((p.kappa - 0.0625).abs() < 1e-15);
        assert!((p.tilde_delta - 0.1 / (p.outer_loops * p.inner_loops) as f64).abs() < 1e-20);
        assert!((p.hastad_gamma - p.alpha * p.kappa.powi(3) / 16.0).abs() < 1e-20);
    }

    #[test]
    fn default_budget_refuses_worst_case_scale() {
        let err = construction_params(1, 1.0 / 12.0, 0.125, 0.05, &ConstructionConfig::default())
            .unwrap_err();
        assert!(matches!(err, JuntaError::Budget { .. }));
    }

    #[test]
    fn dedup_keeps_first_of_each_cluster_and_is_idempotent() {
        let a: Vec<Sign> = (0..16).map(|i| Sign::from_bit(i % 2 == 0)).collect();
        let b: Vec<Sign> = (0..16).map(|i| Sign::from_bit(i % 4 < 2)).collect();
        let neg_a: Vec<Sign> = a.iter().map(|&s| -s).collect();
        let rows = vec![a.clone(), b.clone(), neg_a, a];
        let kept = dedup_by_correlation(&rows);
        assert_eq!(kept, vec![0, 1]);
        let again: Vec<Vec<Sign>> = kept.iter().map(|&i| rows[i].clone()).collect();
        assert_eq!(dedup_by_correlation(&again), vec![0, 1]);
    }

    #[test]
    fn constant_yields_nothing() {
        let f = BooleanOracle::new(Constant {
            n: 8,
            value: Sign::Plus,
        });
        let mut rng = rng_from_seed(51);
        let c = construct_coordinate_oracle(&f, 1, 0.1, 0.125, 0.5, &desk(), &mut rng).unwrap();
        assert!(c.oracles.is_empty());
        assert_eq!(c.stats.declared_queries, c.stats.observed_queries);
    }

    #[test]
    fn dictator_yields_one_member() {
        let f = BooleanOracle::new(Dictator::new(16, 3));
        let mut rng = rng_from_seed(52);
        let c = construct_coordinate_oracle(&f, 1, 0.1, 0.125, 0.5, &desk(), &mut rng).unwrap();
        assert_eq!(c.oracles.len(), 1);
        assert_eq!(c.stats.declared_queries, c.stats.observed_queries);
        let g = c.oracles.get(0);
        let mut agree = 0;
        for _ in 0..64 {
            let x = Point::random(16, &mut rng);
            agree += (g.evaluate(&x, &mut rng) == x.get(3)) as i32;
        }
        assert!(agree <= 2 || agree >= 62, "{agree}");
    }
}
