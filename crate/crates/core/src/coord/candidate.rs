// SPDX-License-Identifier: Apache-2.0

//! Candidate coordinate functions.

use std::fmt;

use serde::Serialize;

use super::hastad::{eta_scale, hastad_sum};
use crate::error::{JuntaError, Result};
use crate::estimate::{check_unit, hoeffding_samples};
use crate::noise::{NoiseSampler, NoiseVector};
use crate::oracle::BooleanOracle;
use crate::point::{Point, Sign};
use crate::restriction::{Overlay, Restriction};
use crate::rng::JuntaRng;

/// A randomized ±1 function meant to approximate `±x_i` for some `i`.
pub trait CoordinateOracle: Send + Sync + fmt::Debug {
    fn dimension(&self) -> usize;

    /// Evaluates at the oracle's own per-call confidence.
    fn evaluate(&self, x: &Point, rng: &mut JuntaRng) -> Sign;

    /// Evaluates with failure probability at most `delta`.
    fn evaluate_with_confidence(&self, x: &Point, delta: f64, rng: &mut JuntaRng) -> Sign {
        let _ = delta;
        self.evaluate(x, rng)
    }

    /// Queries to the underlying function charged by one `evaluate` call.
    fn query_cost(&self) -> u64;

    /// Queries charged by one `evaluate_with_confidence(delta)` call.
    fn query_cost_at(&self, delta: f64) -> u64 {
        let _ = delta;
        self.query_cost()
    }

    fn as_candidate(&self) -> Option<&CandidateDictator> {
        None
    }
}

/// The exact function `±x_i`, for tests and ground-truth runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactDictator {
    pub n: usize,
    pub coord: usize,
    pub negated: bool,
}

impl ExactDictator {
    pub fn new(n: usize, coord: usize) -> Self {
        ExactDictator {
            n,
            coord,
            negated: false,
        }
    }
}

impl CoordinateOracle for ExactDictator {
    fn dimension(&self) -> usize {
        self.n
    }
    fn evaluate(&self, x: &Point, _rng: &mut JuntaRng) -> Sign {
        Sign::from_bit(x.is_minus(self.coord) != self.negated)
    }
    fn query_cost(&self) -> u64 {
        0
    }
}

/// Accuracy and confidence for a candidate's internal estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CandidateSettings {
    pub kappa: f64,
    /// Additive accuracy of each Håstad estimate and of the cached mean.
    pub gamma: f64,
    pub per_call_delta: f64,
}

impl CandidateSettings {
    /// Accuracy `ακ³/16`, half of the variable-isolation margin.
    pub fn standard(kappa: f64, per_call_delta: f64) -> Self {
        CandidateSettings {
            kappa,
            gamma: eta_scale(kappa) * kappa.powi(3) / 16.0,
            per_call_delta,
        }
    }
}

/// `g(x) = sgn(Has_η f↾ρ(x) − E[f↾ρ]³)` with both quantities estimated by
/// sampling. The mean is estimated once, when the candidate is built.
pub struct CandidateDictator {
    oracle: BooleanOracle,
    overlay: Option<Overlay>,
    restriction: Restriction,
    eta: NoiseVector,
    sampler: NoiseSampler,
    settings: CandidateSettings,
    samples_per_call: u64,
    mean_estimate: f64,
}

impl fmt::Debug for CandidateDictator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CandidateDictator")
            .field("survivors", &self.restriction.survivors())
            .field("eta_support", &self.eta.support())
            .field("mean_estimate", &self.mean_estimate)
            .field("samples_per_call", &self.samples_per_call)
            .finish()
    }
}

/// Estimates `E[f↾ρ]` for a lifted restricted oracle; costs
/// `hoeffding_samples(gamma, delta)` queries.
pub fn estimate_restricted_mean(
    f_restricted: &BooleanOracle,
    gamma: f64,
    delta: f64,
    rng: &mut JuntaRng,
) -> Result<f64> {
    crate::estimate::estimate_mean(f_restricted, gamma, delta, rng)
}

/// Builds a candidate for `f↾ρ`, estimating `E[f↾ρ]` at the settings'
/// accuracy. The candidate reads query points of the full dimension and
/// ignores the coordinates fixed by `restriction`.
pub fn make_candidate(
    f: &BooleanOracle,
    restriction: &Restriction,
    eta: &NoiseVector,
    settings: CandidateSettings,
    rng: &mut JuntaRng,
) -> Result<CandidateDictator> {
    check_unit("gamma", settings.gamma)?;
    check_unit("per_call_delta", settings.per_call_delta)?;
    let lifted = restriction.lift(f)?;
    let mean = estimate_restricted_mean(&lifted, settings.gamma, settings.per_call_delta, rng)?;
    CandidateDictator::with_mean(f, restriction, eta, settings, mean)
}

impl CandidateDictator {
    /// Builds a candidate for `f↾ρ` around an already estimated `E[f↾ρ]`.
    pub fn with_mean(
        f: &BooleanOracle,
        restriction: &Restriction,
        eta: &NoiseVector,
        settings: CandidateSettings,
        mean_estimate: f64,
    ) -> Result<CandidateDictator> {
        check_unit("gamma", settings.gamma)?;
        check_unit("per_call_delta", settings.per_call_delta)?;
        let n = f.dimension();
        if eta.dimension() != n || restriction.dimension() != n {
            return Err(JuntaError::argument("candidate parts disagree on dimension"));
        }
        Ok(CandidateDictator {
            oracle: f.clone(),
            overlay: (restriction.survivors().len() < n).then(|| restriction.overlay()),
            restriction: restriction.clone(),
            eta: eta.clone(),
            sampler: eta.sampler(),
            settings,
            samples_per_call: hoeffding_samples(settings.gamma, settings.per_call_delta),
            mean_estimate,
        })
    }

    pub fn restriction(&self) -> &Restriction {
        &self.restriction
    }

    pub fn eta(&self) -> &NoiseVector {
        &self.eta
    }

    pub fn settings(&self) -> &CandidateSettings {
        &self.settings
    }

    pub fn mean_estimate(&self) -> f64 {
        self.mean_estimate
    }

    pub fn samples_per_call(&self) -> u64 {
        self.samples_per_call
    }

    fn eval_with_samples(&self, x: &Point, samples: u64, rng: &mut JuntaRng) -> Sign {
        let sum = hastad_sum(&self.oracle, self.overlay.as_ref(), &self.sampler, x, samples, rng);
        let has = sum as f64 / samples as f64;
        Sign::of(has - self.mean_estimate.powi(3))
    }
}

impl CoordinateOracle for CandidateDictator {
    fn dimension(&self) -> usize {
        self.oracle.dimension()
    }

    fn evaluate(&self, x: &Point, rng: &mut JuntaRng) -> Sign {
        self.eval_with_samples(x, self.samples_per_call, rng)
    }

    fn evaluate_with_confidence(&self, x: &Point, delta: f64, rng: &mut JuntaRng) -> Sign {
        self.eval_with_samples(x, hoeffding_samples(self.settings.gamma, delta), rng)
    }

    fn query_cost(&self) -> u64 {
        3 * self.samples_per_call
    }

    fn query_cost_at(&self, delta: f64) -> u64 {
        3 * hoeffding_samples(self.settings.gamma, delta)
    }

    fn as_candidate(&self) -> Option<&CandidateDictator> {
        Some(self)
    }
}
