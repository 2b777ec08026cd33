// SPDX-License-Identifier: Apache-2.0

//! Sample-mean estimation with Hoeffding sample counts.

use crate::error::{JuntaError, Result};
use crate::oracle::RealOracle;
use crate::point::Point;
use crate::rng::JuntaRng;

/// `⌈2 ln(2/δ) / γ²⌉`: enough samples of a `[−1,1]` variable for the mean
/// to be `γ`-accurate with probability `1 − δ`.
pub fn hoeffding_samples(gamma: f64, delta: f64) -> u64 {
    (2.0 * (2.0 / delta).ln() / (gamma * gamma)).ceil() as u64
}

pub(crate) fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(JuntaError::argument(format!("{name} must lie in (0, 1), got {v}")));
    }
    Ok(())
}

/// Estimates `E_x[o(x)]` over uniform `x`.
pub fn estimate_mean(
    o: &dyn RealOracle,
    gamma: f64,
    delta: f64,
    rng: &mut JuntaRng,
) -> Result<f64> {
    check_unit("gamma", gamma)?;
    check_unit("delta", delta)?;
    let samples = hoeffding_samples(gamma, delta);
    let mut x = Point::ones(o.dimension());
    let mut sum = 0.0;
    for _ in 0..samples {
        x.randomize(rng);
        sum += o.estimate(&x, rng)?;
    }
    Ok(sum / samples as f64)
}
