// SPDX-License-Identifier: Apache-2.0

//! Maximum correlation with a `k`-junta, and the tolerant tester built on it.

use serde::{Deserialize, Serialize};

use crate::best_fit::{best_fit_samples, find_best_fit, BestFitConfig, BestFitParams};
use crate::coord::construct::ConstructionStats;
use crate::coord::{construct_coordinate_oracle, ConstructionConfig, ConstructionParams, Verdict};
use crate::error::{JuntaError, Result};
use crate::estimate::check_unit;
use crate::oracle::BooleanOracle;
use crate::rng::JuntaRng;
use crate::table::TruthTable;

/// Overall confidence parameter of the tester.
pub const TESTER_DELTA: f64 = 1.0 / 3.0;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FullTesterConfig {
    pub construction: ConstructionConfig,
    pub best_fit: BestFitConfig,
    /// Bound `R` on the oracle-set size used to size `ν`. Defaults to
    /// `⌈k³/τ²⌉`, the most coordinates that can have `Inf^{≤k} ≥ τ²/k²`.
    pub oracle_bound: Option<u64>,
    pub nu: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FullTesterParams {
    pub k: usize,
    pub epsilon: f64,
    pub tau: f64,
    pub delta: f64,
    pub oracle_bound: u64,
    pub planned_samples: u64,
    pub nu: f64,
    /// Arity actually fitted: `min(k, |D|)`.
    pub fitted_k: usize,
    pub construction: ConstructionParams,
    pub construction_stats: ConstructionStats,
    pub best_fit: BestFitParams,
}

#[derive(Clone, Debug)]
pub struct TesterOutput {
    pub corr_hat: f64,
    /// Truth table on `{−1,1}^k` over the chosen oracles.
    pub h: TruthTable,
    pub chosen: Vec<usize>,
    pub oracle_count: usize,
    pub params: FullTesterParams,
    pub query_total: u64,
}

/// `τ = ε/4`, `R`, `N` and `ν = δ/(4N)` for the given arity and accuracy.
pub fn full_tester_nu(k: usize, epsilon: f64, config: &FullTesterConfig) -> (f64, u64, u64, f64) {
    let tau = epsilon / 4.0;
    let r = config
        .oracle_bound
        .unwrap_or_else(|| ((k as f64).powi(3) / (tau * tau)).ceil() as u64);
    let n = best_fit_samples(k, r as usize, epsilon / 4.0, TESTER_DELTA / 4.0);
    let nu = config.nu.unwrap_or(TESTER_DELTA / (4.0 * n as f64));
    (tau, r, n, nu)
}

pub fn maximum_correlation_junta(
    f: &BooleanOracle,
    k: usize,
    epsilon: f64,
    config: &FullTesterConfig,
    rng: &mut JuntaRng,
) -> Result<TesterOutput> {
    check_unit("epsilon", epsilon)?;
    if k == 0 {
        return Err(JuntaError::argument("k must be at least 1"));
    }
    let start = f.query_count();
    let delta = TESTER_DELTA;
    let (tau, r, planned, nu) = full_tester_nu(k, epsilon, config);
    let built = construct_coordinate_oracle(f, k, delta / 4.0, nu, tau, &config.construction, rng)?;
    let fitted_k = k.min(built.oracles.len());
    let fit = find_best_fit(
        f,
        &built.oracles,
        fitted_k,
        epsilon / 4.0,
        delta / 4.0,
        &config.best_fit,
        rng,
    )?;
    // Extra arity beyond the oracle count is padded with ignored inputs.
    let mask = (1u64 << fitted_k) - 1;
    let h = TruthTable::from_fn(k, |y| fit.h.get(y & mask))?;
    Ok(TesterOutput {
        corr_hat: fit.corr_estimate,
        h,
        chosen: fit.chosen,
        oracle_count: built.oracles.len(),
        params: FullTesterParams {
            k,
            epsilon,
            tau,
            delta,
            oracle_bound: r,
            planned_samples: planned,
            nu,
            fitted_k,
            construction: built.params,
            construction_stats: built.stats,
            best_fit: fit.params,
        },
        query_total: f.query_count() - start,
    })
}

/// `ε = (c_u − c_ℓ)/2` and the threshold `1 − 2c_ℓ − 2ε`.
pub fn tolerance_threshold(c_u: f64, c_l: f64) -> Result<(f64, f64)> {
    if !(0.0 <= c_l && c_l < c_u && c_u < 0.5) {
        return Err(JuntaError::argument(format!(
            "need 0 <= c_l < c_u < 1/2, got c_l = {c_l}, c_u = {c_u}"
        )));
    }
    let eps = (c_u - c_l) / 2.0;
    let thr = 1.0 - 2.0 * c_l - 2.0 * eps;
    let mirrored = 1.0 - 2.0 * c_u + 2.0 * eps;
    assert!((thr - mirrored).abs() <= 1e-12, "threshold identity violated");
    Ok((eps, thr))
}

#[derive(Clone, Debug)]
pub struct TolerantDecision<O> {
    pub verdict: Verdict,
    pub epsilon: f64,
    pub threshold: f64,
    pub estimate: f64,
    pub output: O,
}

pub fn tolerant_test(
    f: &BooleanOracle,
    k: usize,
    c_u: f64,
    c_l: f64,
    config: &FullTesterConfig,
    rng: &mut JuntaRng,
) -> Result<TolerantDecision<TesterOutput>> {
    let (eps, thr) = tolerance_threshold(c_u, c_l)?;
    let out = maximum_correlation_junta(f, k, eps, config, rng)?;
    let verdict = if out.corr_hat >= thr {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    Ok(TolerantDecision {
        verdict,
        epsilon: eps,
        threshold: thr,
        estimate: out.corr_hat,
        output: out,
    })
}
