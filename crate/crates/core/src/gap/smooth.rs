// SPDX-License-Identifier: Apache-2.0

//! The noise operator `T_{1−s}` applied to a real oracle by sampling.

use std::sync::Arc;

use crate::error::{JuntaError, Result};
use crate::estimate::{check_unit, hoeffding_samples};
use crate::oracle::RealOracle;
use crate::point::Point;
use crate::rng::JuntaRng;

use super::walk::flip_bits;

/// Mean of `f(x·z)` over `samples` draws of `z ∼ Z_{1−s}`, where each bit of
/// `z` is −1 with probability `s/2`.
pub fn smooth_with_samples(
    f: &dyn RealOracle,
    x: &Point,
    s: f64,
    samples: u64,
    rng: &mut JuntaRng,
) -> Result<f64> {
    check_unit("s", s)?;
    if x.dimension() != f.dimension() {
        return Err(JuntaError::argument("point and function disagree on dimension"));
    }
    let samples = samples.max(1);
    let mut y = x.clone();
    let mut sum = 0.0;
    for _ in 0..samples {
        y.clone_from(x);
        flip_bits(&mut y, s / 2.0, rng);
        sum += f.estimate(&y, rng)?;
    }
    Ok(sum / samples as f64)
}

/// Estimates `T_{1−s} f(x)` to within `γ` plus the accuracy of `f`, with
/// `⌈2 ln(2/δ)/γ²⌉` samples.
pub fn smooth_query(
    f: &dyn RealOracle,
    x: &Point,
    s: f64,
    gamma: f64,
    delta: f64,
    rng: &mut JuntaRng,
) -> Result<f64> {
    check_unit("gamma", gamma)?;
    check_unit("delta", delta)?;
    smooth_with_samples(f, x, s, hoeffding_samples(gamma, delta), rng)
}

/// `T_{1−s} f` as a real oracle.
#[derive(Clone)]
pub struct SmoothedOracle {
    inner: Arc<dyn RealOracle>,
    s: f64,
    samples: u64,
    gamma: f64,
    delta: f64,
}

impl SmoothedOracle {
    pub fn new(inner: Arc<dyn RealOracle>, s: f64, gamma: f64, delta: f64) -> Result<Self> {
        check_unit("gamma", gamma)?;
        check_unit("delta", delta)?;
        SmoothedOracle::with_samples(inner, s, hoeffding_samples(gamma, delta), gamma, delta)
    }

    /// A fixed sample count; `gamma` and `delta` are carried for reporting.
    pub fn with_samples(
        inner: Arc<dyn RealOracle>,
        s: f64,
        samples: u64,
        gamma: f64,
        delta: f64,
    ) -> Result<Self> {
        check_unit("s", s)?;
        Ok(SmoothedOracle {
            inner,
            s,
            samples: samples.max(1),
            gamma,
            delta,
        })
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn noise(&self) -> f64 {
        self.s
    }
}

impl RealOracle for SmoothedOracle {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }
    fn estimate(&self, x: &Point, rng: &mut JuntaRng) -> Result<f64> {
        smooth_with_samples(self.inner.as_ref(), x, self.s, self.samples, rng)
    }
    fn accuracy(&self) -> f64 {
        self.inner.accuracy() + self.gamma
    }
    fn failure_probability(&self) -> f64 {
        self.delta + self.samples as f64 * self.inner.failure_probability()
    }
    fn query_cost(&self) -> f64 {
        self.samples as f64 * self.inner.query_cost()
    }
}
