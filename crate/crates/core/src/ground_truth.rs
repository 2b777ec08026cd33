// SPDX-License-Identifier: Apache-2.0

//! Exhaustive computation of the quantities the testers estimate.

use serde::Serialize;

use crate::best_fit::{binomial, subsets};
use crate::error::{JuntaError, Result};
use crate::noise::NoiseVector;
use crate::par::{map_range, Execution};
use crate::point::Sign;
use crate::restriction::Restriction;
use crate::spectrum::{inverse_wht, wht, FourierSpectrum};
use crate::table::{RealTable, TruthTable};

/// Default bound on elementary operations of one enumeration.
pub const DEFAULT_WORK_CAP: u64 = 1 << 30;

/// The best correlation with a junta on a bounded number of coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactJuntaMax {
    pub value: f64,
    pub best_subset: Vec<usize>,
    /// `sign(f_avg,T)` with `+1` on zeros; bit `j` is `best_subset[j]`.
    #[serde(skip)]
    pub best_h: TruthTable,
}

fn check_subset(n: usize, s: &[usize]) -> Result<()> {
    for (j, &c) in s.iter().enumerate() {
        if c >= n || s[..j].contains(&c) {
            return Err(JuntaError::argument(format!(
                "coordinate set {s:?} is not a set of distinct coordinates below {n}"
            )));
        }
    }
    if s.len() > 63 {
        return Err(JuntaError::argument("coordinate set too large"));
    }
    Ok(())
}

#[inline]
fn local_index(x: u64, s: &[usize]) -> usize {
    s.iter()
        .enumerate()
        .fold(0usize, |acc, (j, &c)| acc | ((((x >> c) & 1) as usize) << j))
}

/// Sums of `values` over the cells of the coordinates in `s`.
fn cell_sums(values: &[f64], s: &[usize]) -> Vec<f64> {
    let mut sums = vec![0.0; 1 << s.len()];
    for (x, &v) in values.iter().enumerate() {
        sums[local_index(x as u64, s)] += v;
    }
    sums
}

/// `f_avg,S` as a table on `{−1,1}^S`; bit `j` of the index is `s[j]`.
pub fn exact_avg_real(f: &RealTable, s: &[usize]) -> Result<RealTable> {
    let n = f.dimension();
    check_subset(n, s)?;
    let per_cell = (1u64 << (n - s.len())) as f64;
    let sums = cell_sums(f.values(), s);
    RealTable::new(s.len(), sums.into_iter().map(|v| v / per_cell).collect())
}

pub fn exact_avg(f: &TruthTable, s: &[usize]) -> Result<RealTable> {
    exact_avg_real(&RealTable::from_truth_table(f), s)
}

/// `E[|f_avg,S|]`, the best correlation of `f` with a function of `s`.
pub fn subset_correlation(f: &RealTable, s: &[usize]) -> Result<f64> {
    check_subset(f.dimension(), s)?;
    let sums = cell_sums(f.values(), s);
    Ok(sums.iter().map(|v| v.abs()).sum::<f64>() / f.values().len() as f64)
}

/// Work charged to scanning `subsets` subsets of a table on `n` inputs.
fn scan_work(n: usize, subsets: u64) -> u64 {
    subsets.saturating_mul(1u64 << n)
}

/// Maximum of `E[|f_avg,T|]` over `T ⊆ allowed` with `|T| = min(k, |allowed|)`,
/// ties going to the lexicographically first `T`.
pub fn exact_max_within(
    f: &RealTable,
    allowed: &[usize],
    k: usize,
    work_cap: u64,
    execution: Execution,
) -> Result<ExactJuntaMax> {
    let n = f.dimension();
    check_subset(n, allowed)?;
    let size = k.min(allowed.len());
    let count = binomial(allowed.len(), size);
    let work = scan_work(n, count);
    if work > work_cap {
        return Err(JuntaError::Budget {
            stage: "exact junta maximum",
            detail: format!("C({}, {size}) subsets of a table on {n} inputs", allowed.len()),
            budget: work_cap,
        });
    }
    let candidates: Vec<Vec<usize>> = subsets(allowed.len(), size)
        .into_iter()
        .map(|t| t.into_iter().map(|j| allowed[j]).collect())
        .collect();
    let values = map_range(execution, candidates.len(), |i| {
        let sums = cell_sums(f.values(), &candidates[i]);
        sums.iter().map(|v| v.abs()).sum::<f64>() / f.values().len() as f64
    });
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    let subset = candidates[best].clone();
    let avg = exact_avg_real(f, &subset)?;
    let best_h = TruthTable::from_reals(subset.len(), avg.values())?;
    Ok(ExactJuntaMax {
        value: values[best],
        best_subset: subset,
        best_h,
    })
}

/// `max_{g ∈ J_{n,k}} E[fg]` for a real-valued table.
pub fn exact_max_junta_corr_real(f: &RealTable, k: usize, work_cap: u64) -> Result<ExactJuntaMax> {
    if k > f.dimension() {
        return Err(JuntaError::argument(format!(
            "k = {k} exceeds the dimension {}",
            f.dimension()
        )));
    }
    let all: Vec<usize> = (0..f.dimension()).collect();
    exact_max_within(f, &all, k, work_cap, Execution::default())
}

/// `max_{g ∈ J_{n,k}} E[fg]` with the default work cap.
pub fn exact_max_junta_corr(f: &TruthTable, k: usize) -> Result<ExactJuntaMax> {
    exact_max_junta_corr_capped(f, k, DEFAULT_WORK_CAP)
}

pub fn exact_max_junta_corr_capped(f: &TruthTable, k: usize, work_cap: u64) -> Result<ExactJuntaMax> {
    exact_max_junta_corr_real(&RealTable::from_truth_table(f), k, work_cap)
}

/// `(1 − max corr)/2`.
pub fn exact_distance_to_juntas(f: &TruthTable, k: usize) -> Result<f64> {
    exact_distance_to_juntas_capped(f, k, DEFAULT_WORK_CAP)
}

pub fn exact_distance_to_juntas_capped(f: &TruthTable, k: usize, work_cap: u64) -> Result<f64> {
    Ok((1.0 - exact_max_junta_corr_capped(f, k, work_cap)?.value) / 2.0)
}

/// The exact counterpart of the gap tester's output with every coordinate
/// available: `f_smooth = T_{1−ε/(2k)} f`, the coordinates whose influence on
/// `f_smooth` is at least `ε/k`, and `E[|f_smooth,avg,S′|]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactGapValue {
    pub selected: Vec<usize>,
    pub value: f64,
    /// `min(⌈k²/ε²⌉, n)`.
    pub k_prime: usize,
}

pub fn exact_gap_value(f: &RealTable, k: usize, epsilon: f64) -> Result<ExactGapValue> {
    if k == 0 || !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(JuntaError::argument("need k ≥ 1 and ε in (0, 1)"));
    }
    let n = f.dimension();
    let s = epsilon / (2.0 * k as f64);
    let smooth = wht(f.values())?.apply_noise(1.0 - s);
    let t = epsilon / k as f64;
    let selected: Vec<usize> = (0..n).filter(|&i| smooth.influence(i) >= t).collect();
    let smoothed = RealTable::new(n, inverse_wht(&smooth))?;
    Ok(ExactGapValue {
        value: subset_correlation(&smoothed, &selected)?,
        selected,
        k_prime: crate::gap::gap_arity(k, epsilon, n),
    })
}

/// `E[fg]` over the cube.
pub fn exact_correlation(f: &RealTable, g: &RealTable) -> Result<f64> {
    if f.dimension() != g.dimension() {
        return Err(JuntaError::argument("tables disagree on dimension"));
    }
    let dot: f64 = f.values().iter().zip(g.values()).map(|(a, b)| a * b).sum();
    Ok(dot / f.values().len() as f64)
}

/// `Pr_{ρ∼R_μ}[|f̂↾ρ(i)| ≥ threshold]`, enumerating all `3^n` patterns.
pub fn exact_restriction_hit_probability(
    spec: &FourierSpectrum,
    i: usize,
    mu: f64,
    threshold: f64,
    work_cap: u64,
) -> Result<f64> {
    let n = spec.dimension();
    if i >= n || !(0.0..=1.0).contains(&mu) {
        return Err(JuntaError::argument("need i < n and μ in [0, 1]"));
    }
    let patterns = 3u64.checked_pow(n as u32).unwrap_or(u64::MAX);
    if patterns.saturating_mul(1 << n) > work_cap {
        return Err(JuntaError::Budget {
            stage: "restriction enumeration",
            detail: format!("3^{n} patterns of a spectrum on {n} variables"),
            budget: work_cap,
        });
    }
    let fixed = (1.0 - mu) / 2.0;
    let mut rho = vec![0.0; n];
    let mut total = 0.0;
    for code in 0..patterns {
        let mut c = code;
        let mut weight = 1.0;
        for r in rho.iter_mut() {
            *r = match c % 3 {
                0 => 0.0,
                1 => 1.0,
                _ => -1.0,
            };
            weight *= if *r == 0.0 { mu } else { fixed };
            c /= 3;
        }
        if spec.discrete_derivative(i, &rho).abs() >= threshold {
            total += weight;
        }
    }
    Ok(total)
}

/// The spectrum `f̂(S)³ η^S` of the Håstad operator.
pub fn hastad_spectrum(spec: &FourierSpectrum, eta: &NoiseVector) -> Result<FourierSpectrum> {
    if eta.dimension() != spec.dimension() {
        return Err(JuntaError::argument("noise vector and spectrum disagree on dimension"));
    }
    let coeffs = spec
        .coefficients()
        .iter()
        .enumerate()
        .map(|(mask, &c)| c * c * c * eta.monomial(mask as u64))
        .collect();
    FourierSpectrum::from_coefficients(coeffs)
}

/// `Has_η f` as a table, through the spectrum.
pub fn exact_hastad(f: &TruthTable, eta: &NoiseVector) -> Result<RealTable> {
    let spec = wht(&f.to_reals())?;
    let has = hastad_spectrum(&spec, eta)?;
    RealTable::new(f.dimension(), inverse_wht(&has))
}

/// `Has_η f` from `E[f(y₁) f(y₂) f(x·y₁·y₂·y₃)]` by enumerating `y₁, y₂`
/// and weighting `y₃` by `Π (1 + η_i y₃ᵢ)/2`. Costs `2^{4n}`.
pub fn hastad_by_definition(f: &TruthTable, eta: &NoiseVector) -> Result<RealTable> {
    let n = f.dimension();
    if n > 6 {
        return Err(JuntaError::argument("the triple expectation is enumerated only up to n = 6"));
    }
    if eta.dimension() != n {
        return Err(JuntaError::argument("noise vector and table disagree on dimension"));
    }
    let size = 1u64 << n;
    let weight: Vec<f64> = (0..size)
        .map(|z| {
            (0..n)
                .map(|i| {
                    let zi = if (z >> i) & 1 == 1 { -1.0 } else { 1.0 };
                    (1.0 + eta.get(i) * zi) / 2.0
                })
                .product()
        })
        .collect();
    let v = |x: u64| f.get(x).value();
    let uniform = 1.0 / (size * size) as f64;
    let values = (0..size)
        .map(|x| {
            let mut total = 0.0;
            for y1 in 0..size {
                for y2 in 0..size {
                    let pair = v(y1) * v(y2);
                    let inner: f64 = (0..size).map(|z| weight[z as usize] * v(x ^ y1 ^ y2 ^ z)).sum();
                    total += pair * inner;
                }
            }
            total * uniform
        })
        .collect();
    RealTable::new(n, values)
}

/// The noiseless form of a candidate built from a junta: with exact
/// estimates it is `sgn(Has_η f↾ρ − E[f↾ρ]³)` on the junta's survivors.
#[derive(Clone, Debug)]
pub struct IdealCandidate {
    /// Junta coordinates left free by the restriction.
    pub survivors: Vec<usize>,
    /// Table over the survivors; bit `j` is `survivors[j]`.
    pub table: TruthTable,
}

/// Nearest signed dictator of a candidate table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NearestDictator {
    pub coord: usize,
    pub negated: bool,
    pub distance: f64,
}

/// The ideal candidate for the junta `local` on `coords` under `restriction`
/// and noise `eta`, both on the ambient cube.
pub fn ideal_candidate(
    coords: &[usize],
    local: &TruthTable,
    restriction: &Restriction,
    eta: &NoiseVector,
) -> Result<IdealCandidate> {
    let n = restriction.dimension();
    check_subset(n, coords)?;
    if local.dimension() != coords.len() || eta.dimension() != n {
        return Err(JuntaError::argument("junta parts disagree on dimension"));
    }
    let survivors: Vec<usize> = coords.iter().copied().filter(|&c| restriction.survives(c)).collect();
    let free: Vec<usize> = (0..coords.len()).filter(|&j| restriction.survives(coords[j])).collect();
    let mut fixed = 0u64;
    for (j, &c) in coords.iter().enumerate() {
        if restriction.pattern()[c] == -1 {
            fixed |= 1 << j;
        }
    }
    let m = survivors.len();
    let restricted = TruthTable::from_fn(m, |y| {
        let mut idx = fixed;
        for (b, &j) in free.iter().enumerate() {
            idx |= ((y >> b) & 1) << j;
        }
        local.get(idx)
    })?;
    let spec = wht(&restricted.to_reals())?;
    let local_eta = NoiseVector::new(survivors.iter().map(|&c| eta.get(c)).collect())?;
    let has = inverse_wht(&hastad_spectrum(&spec, &local_eta)?);
    let mean_cubed = spec.coefficient(0).powi(3);
    let table = TruthTable::from_fn(m, |y| Sign::of(has[y as usize] - mean_cubed))?;
    Ok(IdealCandidate { survivors, table })
}

impl IdealCandidate {
    /// The closest `±x_i` among the survivors; distance `1/2` when none.
    pub fn nearest_dictator(&self) -> Option<NearestDictator> {
        let m = self.survivors.len();
        let size = 1u64 << m;
        let mut best: Option<NearestDictator> = None;
        for (j, &c) in self.survivors.iter().enumerate() {
            let disagree = (0..size)
                .filter(|&y| self.table.get(y).is_minus() != ((y >> j) & 1 == 1))
                .count() as f64
                / size as f64;
            for (negated, d) in [(false, disagree), (true, 1.0 - disagree)] {
                if best.is_none_or(|b| d < b.distance) {
                    best = Some(NearestDictator {
                        coord: c,
                        negated,
                        distance: d,
                    });
                }
            }
        }
        best
    }
}
