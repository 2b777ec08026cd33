// SPDX-License-Identifier: Apache-2.0

//! Exact Fourier machinery for small dimensions.
//!
//! Subsets are n-bit masks. With −1 stored as a set bit, the character
//! `χ_S(x)` is `(−1)^popcount(S & x)`, so the transform is the plain
//! Walsh–Hadamard butterfly followed by a `2^-n` scale.

use std::io::Write;

use crate::error::{JuntaError, Result};
use crate::point::Point;
use crate::restriction::Restriction;

/// Default dimension cap for the exact machinery.
pub const DEFAULT_EXACT_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct FourierSpectrum {
    n: usize,
    coeffs: Vec<f64>,
}

/// In-place unnormalized transform: `out[S] = Σ_x v[x] (−1)^|S∩x|`.
pub(crate) fn butterfly(v: &mut [f64]) {
    let len = v.len();
    let mut h = 1;
    while h < len {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

fn dimension_of(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(JuntaError::argument(format!(
            "table length {len} is not a power of two"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Fourier coefficients of a tabulated function, with the default cap.
pub fn wht(table: &[f64]) -> Result<FourierSpectrum> {
    wht_with_cap(table, DEFAULT_EXACT_CAP)
}

pub fn wht_with_cap(table: &[f64], cap: usize) -> Result<FourierSpectrum> {
    let n = dimension_of(table.len())?;
    if n > cap {
        return Err(JuntaError::Capacity { n, cap });
    }
    let mut coeffs = table.to_vec();
    butterfly(&mut coeffs);
    let scale = 1.0 / table.len() as f64;
    for c in coeffs.iter_mut() {
        *c *= scale;
    }
    Ok(FourierSpectrum { n, coeffs })
}

/// The function whose spectrum is `spec`.
pub fn inverse_wht(spec: &FourierSpectrum) -> Vec<f64> {
    let mut v = spec.coeffs.clone();
    butterfly(&mut v);
    v
}

impl FourierSpectrum {
    pub fn from_coefficients(coeffs: Vec<f64>) -> Result<FourierSpectrum> {
        let n = dimension_of(coeffs.len())?;
        Ok(FourierSpectrum { n, coeffs })
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    #[inline]
    pub fn coefficient(&self, mask: u64) -> f64 {
        self.coeffs[mask as usize]
    }

    pub fn squared_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn influence(&self, i: usize) -> f64 {
        self.weight_where(|s| s >> i & 1 == 1)
    }

    pub fn low_degree_influence(&self, i: usize, k: usize) -> f64 {
        self.weight_where(|s| s >> i & 1 == 1 && s.count_ones() as usize <= k)
    }

    pub fn influences(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.influence(i)).collect()
    }

    pub fn total_influence(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(s, c)| s.count_ones() as f64 * c * c)
            .sum()
    }

    fn weight_where(&self, keep: impl Fn(usize) -> bool) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(s, _)| keep(*s))
            .map(|(_, c)| c * c)
            .sum()
    }

    /// `T_ρ`: scales the coefficient of `S` by `ρ^|S|`.
    pub fn apply_noise(&self, rho: f64) -> FourierSpectrum {
        let powers: Vec<f64> = (0..=self.n as i32).map(|d| rho.powi(d)).collect();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(s, c)| c * powers[s.count_ones() as usize])
            .collect();
        FourierSpectrum { n: self.n, coeffs }
    }

    /// `Σ_{S ∌ i} f̂(S ∪ {i}) Π_{j∈S} ρ_j`.
    pub fn discrete_derivative(&self, i: usize, rho: &[f64]) -> f64 {
        assert_eq!(rho.len(), self.n);
        let bit = 1usize << i;
        let mut total = 0.0;
        for (s, &c) in self.coeffs.iter().enumerate() {
            if s & bit == 0 || c == 0.0 {
                continue;
            }
            let mut rest = s & !bit;
            let mut prod = c;
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                prod *= rho[j];
                rest &= rest - 1;
            }
            total += prod;
        }
        total
    }

    /// Value of the expansion at `x`.
    pub fn evaluate(&self, x: &Point) -> f64 {
        let xi = x.index() as usize;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(s, c)| if (s & xi).count_ones() % 2 == 1 { -c } else { *c })
            .sum()
    }

    /// Spectrum of `f↾ξ` on its survivors, in increasing coordinate order:
    /// `f̂↾ξ(T) = Σ_{S : S∩surv = T} f̂(S) Π_{j∈S∖T} ξ_j`.
    pub fn restrict(&self, xi: &Restriction) -> FourierSpectrum {
        assert_eq!(xi.dimension(), self.n);
        let survivors = xi.survivors();
        let rho = xi.as_rho_point();
        let mut out = vec![0.0; 1usize << survivors.len()];
        for (s, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut weight = c;
            let mut t = 0usize;
            let mut rest = s;
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                if rho[j] == 0.0 {
                    let pos = survivors.binary_search(&j).unwrap();
                    t |= 1 << pos;
                } else {
                    weight *= rho[j];
                }
                rest &= rest - 1;
            }
            out[t] += weight;
        }
        FourierSpectrum {
            n: survivors.len(),
            coeffs: out,
        }
    }

    /// Writes `mask,coefficient` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "mask,coefficient")?;
        for (s, c) in self.coeffs.iter().enumerate() {
            writeln!(w, "{s},{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maj3() -> Vec<f64> {
        (0..8u32)
            .map(|x| if x.count_ones() >= 2 { -1.0 } else { 1.0 })
            .collect()
    }

    fn dict1(n: usize) -> Vec<f64> {
        (0..1u32 << n)
            .map(|x| if x & 1 == 1 { -1.0 } else { 1.0 })
            .collect()
    }

    #[test]
    fn majority_spectrum() {
        let s = wht(&maj3()).unwrap();
        for m in 0..8u64 {
            let want = match m {
                0b001 | 0b010 | 0b100 => 0.5,
                0b111 => -0.5,
                _ => 0.0,
            };
            assert!((s.coefficient(m) - want).abs() < 1e-12, "mask {m}");
        }
    }

    #[test]
    fn dictator_and_constant_spectra() {
        let s = wht(&dict1(2)).unwrap();
        assert_eq!(s.coefficients(), &[0.0, 1.0, 0.0, 0.0]);
        let c = wht(&[1.0; 4]).unwrap();
        assert_eq!(c.coefficients(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn influence_examples() {
        let m = wht(&maj3()).unwrap();
        assert!((m.influence(0) - 0.5).abs() < 1e-12);
        assert!((m.low_degree_influence(0, 1) - 0.25).abs() < 1e-12);
        assert!((m.low_degree_influence(0, 3) - 0.5).abs() < 1e-12);
        assert!((m.total_influence() - 1.5).abs() < 1e-12);
        let d = wht(&dict1(2)).unwrap();
        assert_eq!(d.influence(0), 1.0);
        assert_eq!(d.influence(1), 0.0);
        assert_eq!(d.low_degree_influence(0, 1), 1.0);
        assert_eq!(d.total_influence(), 1.0);
        assert_eq!(wht(&[1.0; 8]).unwrap().total_influence(), 0.0);
    }

    #[test]
    fn noise_examples() {
        let m = wht(&maj3()).unwrap().apply_noise(0.5);
        assert!((m.coefficient(1) - 0.25).abs() < 1e-12);
        assert!((m.coefficient(7) + 0.0625).abs() < 1e-12);
        let d = wht(&dict1(2)).unwrap();
        assert_eq!(d.apply_noise(0.5).coefficient(1), 0.5);
        assert_eq!(d.apply_noise(1.0), d);
    }

    #[test]
    fn derivative_examples() {
        let m = wht(&maj3()).unwrap();
        assert!((m.discrete_derivative(0, &[0.0, 0.0, 0.0]) - 0.5).abs() < 1e-12);
        assert!(m.discrete_derivative(0, &[0.0, 1.0, 1.0]).abs() < 1e-12);
        let d = wht(&dict1(3)).unwrap();
        assert_eq!(d.discrete_derivative(0, &[0.3, -1.0, 0.7]), 1.0);
    }

    #[test]
    fn restricted_majority_is_or_like() {
        let m = wht(&maj3()).unwrap();
        let r = m.restrict(&Restriction::new(vec![0, 0, 1]).unwrap());
        assert_eq!(r.dimension(), 2);
        let want = [0.5, 0.5, 0.5, -0.5];
        for (c, w) in r.coefficients().iter().zip(want) {
            assert!((c - w).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_lengths_and_caps() {
        assert!(matches!(wht(&[1.0; 3]), Err(JuntaError::Argument(_))));
        assert!(matches!(
            wht_with_cap(&[1.0; 16], 3),
            Err(JuntaError::Capacity { n: 4, cap: 3 })
        ));
    }

    #[test]
    fn csv_export() {
        let mut out = Vec::new();
        wht(&dict1(1)).unwrap().write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "mask,coefficient\n0,0\n1,1\n");
    }
}
