// SPDX-License-Identifier: Apache-2.0

//! Exhaustive ground truth for generated functions.

use junta_core::ground_truth::{exact_max_junta_corr_capped, ExactJuntaMax, DEFAULT_WORK_CAP};
use junta_core::TruthTable;
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::gen::Generated;

pub const WORK_CAP_ENV: &str = "JUNTA_PROBE_WORK_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruthSource {
    /// Enumerated from the full truth table.
    Table,
    /// Enumerated from the local table of a noiseless planted junta.
    PlantedJunta,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundTruth {
    pub source: TruthSource,
    pub k: usize,
    pub max_corr_k: f64,
    pub best_subset_k: Vec<usize>,
    pub distance_k: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_prime: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_corr_k_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_k_prime: Option<f64>,
}

/// The configured cap, else the environment variable, else the default.
pub fn work_cap(configured: Option<u64>) -> Result<u64> {
    if let Some(c) = configured {
        return Ok(c);
    }
    match std::env::var(WORK_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| HarnessError::config(format!("{WORK_CAP_ENV} must be an integer, got '{v}'"))),
        Err(_) => Ok(DEFAULT_WORK_CAP),
    }
}

/// Ground truth at arity `k`, and at `k_prime` when given. `None` when the
/// function is neither tabulated nor a noiseless planted junta.
pub fn ground_truth(
    g: &Generated,
    k: usize,
    k_prime: Option<usize>,
    cap: u64,
) -> Result<Option<GroundTruth>> {
    let (source, at): (TruthSource, Box<dyn Fn(usize) -> Result<ExactJuntaMax>>) = if let Some(t) = &g.table {
        let t = t.clone();
        (TruthSource::Table, Box::new(move |k| Ok(exact_max_junta_corr_capped(&t, k, cap)?)))
    } else if let Some(p) = g.planted.as_ref().filter(|_| g.summary.realized_noise == 0.0) {
        let p = p.clone();
        (
            TruthSource::PlantedJunta,
            Box::new(move |k| planted_max(&p.local, &p.coords, k, cap)),
        )
    } else {
        return Ok(None);
    };
    let main = at(k)?;
    let prime = k_prime.map(&at).transpose()?;
    Ok(Some(GroundTruth {
        source,
        k,
        distance_k: (1.0 - main.value) / 2.0,
        max_corr_k: main.value,
        best_subset_k: main.best_subset,
        k_prime,
        max_corr_k_prime: prime.as_ref().map(|m| m.value),
        distance_k_prime: prime.as_ref().map(|m| (1.0 - m.value) / 2.0),
    }))
}

/// A junta's best `k`-subset lies among its own coordinates, so the local
/// table suffices.
fn planted_max(local: &TruthTable, coords: &[usize], k: usize, cap: u64) -> Result<ExactJuntaMax> {
    let mut m = exact_max_junta_corr_capped(local, k.min(coords.len()), cap)?;
    m.best_subset = m.best_subset.iter().map(|&j| coords[j]).collect();
    Ok(m)
}
