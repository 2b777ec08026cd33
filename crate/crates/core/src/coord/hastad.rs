// SPDX-License-Identifier: Apache-2.0

//! The Håstad operator `Has_η f(x) = E[f(y₁) f(y₂) f(x·y₁·y₂·y₃)]` with
//! `y₁, y₂` uniform and `y₃ ∼ Z_η`. Its expansion is `Σ_S f̂(S)³ η^S χ_S(x)`.

use rand::Rng;

use crate::error::{JuntaError, Result};
use crate::estimate::{check_unit, hoeffding_samples};
use crate::noise::{NoiseSampler, NoiseVector};
use crate::oracle::BooleanOracle;
use crate::point::Point;
use crate::restriction::Overlay;
use crate::rng::JuntaRng;

/// Scale `α = κ³/16` of the nonzero noise entries.
pub fn eta_scale(kappa: f64) -> f64 {
    kappa.powi(3) / 16.0
}

/// Probability `κ⁶/16` that a coordinate receives a nonzero entry.
pub fn eta_probability(kappa: f64) -> f64 {
    kappa.powi(6) / 16.0
}

/// Draws `η ∈ {0, α}^n` with independent entries, `Pr[η_i = α] = κ⁶/16`.
pub fn sample_eta(kappa: f64, n: usize, rng: &mut JuntaRng) -> Result<NoiseVector> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(JuntaError::argument(format!("kappa must lie in (0, 1], got {kappa}")));
    }
    let alpha = eta_scale(kappa);
    let p = eta_probability(kappa);
    let eta = (0..n)
        .map(|_| if rng.random::<f64>() < p { alpha } else { 0.0 })
        .collect();
    NoiseVector::new(eta)
}

/// Sum of `samples` products `f(y₁) f(y₂) f(x·y₁·y₂·y₃)`, as an integer.
/// With an overlay the function queried is `f↾ρ` on the ambient cube.
pub(crate) fn hastad_sum(
    f: &BooleanOracle,
    overlay: Option<&Overlay>,
    sampler: &NoiseSampler,
    x: &Point,
    samples: u64,
    rng: &mut JuntaRng,
) -> i64 {
    let n = x.dimension();
    let mut tally = f.tally();
    let mut y1 = Point::ones(n);
    let mut y2 = Point::ones(n);
    let mut z = Point::ones(n);
    let mut sum = 0i64;
    for _ in 0..samples {
        y1.randomize(rng);
        y2.randomize(rng);
        if let Some(o) = overlay {
            o.apply(&mut y1);
            o.apply(&mut y2);
        }
        sampler.sample_into(rng, &mut z);
        for (((w, a), b), c) in z
            .words_mut()
            .iter_mut()
            .zip(y1.words())
            .zip(y2.words())
            .zip(x.words())
        {
            *w ^= a ^ b ^ c;
        }
        if let Some(o) = overlay {
            o.apply(&mut z);
        }
        let prod = tally.query(&y1) * tally.query(&y2) * tally.query(&z);
        sum += prod.as_i8() as i64;
    }
    sum
}

/// Estimates `Has_η f(x)` to within `γ` with probability `1 − δ`, using
/// `⌈2 ln(2/δ)/γ²⌉` samples of three queries each.
pub fn estimate_hastad(
    f: &BooleanOracle,
    eta: &NoiseVector,
    x: &Point,
    gamma: f64,
    delta: f64,
    rng: &mut JuntaRng,
) -> Result<f64> {
    check_unit("gamma", gamma)?;
    check_unit("delta", delta)?;
    if eta.dimension() != f.dimension() || x.dimension() != f.dimension() {
        return Err(JuntaError::argument("dimension mismatch"));
    }
    let samples = hoeffding_samples(gamma, delta);
    let sum = hastad_sum(f, None, &eta.sampler(), x, samples, rng);
    Ok(sum as f64 / samples as f64)
}
