// SPDX-License-Identifier: Apache-2.0

//! Declarative experiment configuration, read from TOML.

use std::path::{Path, PathBuf};

use junta_core::full_tester::FullTesterConfig;
use junta_core::gap::GapTesterConfig;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Largest dimension whose truth table is materialized.
pub const DEFAULT_TABLE_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Dictator,
    Parity,
    Majority,
    NoisyJunta,
    Random,
    FromFile,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Each label flips independently with probability `noise`.
    #[default]
    Independent,
    /// Exactly `round(noise · 2^n)` distinct labels flip.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub family: Family,
    pub n: usize,
    /// Size of the planted junta. Ignored by `random` and `from-file`.
    #[serde(default = "one")]
    pub k_true: usize,
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub noise_mode: NoiseMode,
    /// Seed for drawing the function; defaults to the experiment seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default = "table_cap")]
    pub table_cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TesterKind {
    Full,
    Gap,
    TolerantFull,
    TolerantGap,
}

impl TesterKind {
    pub fn is_tolerant(self) -> bool {
        matches!(self, TesterKind::TolerantFull | TesterKind::TolerantGap)
    }

    pub fn is_gap(self) -> bool {
        matches!(self, TesterKind::Gap | TesterKind::TolerantGap)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TesterSpec {
    pub which: TesterKind,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_l: Option<f64>,
}

impl TesterSpec {
    /// The accuracy parameter the tester runs at.
    pub fn epsilon(&self) -> Result<f64> {
        if self.which.is_tolerant() {
            let (c_u, c_l) = self.tolerances()?;
            Ok((c_u - c_l) / 2.0)
        } else {
            self.epsilon
                .ok_or_else(|| HarnessError::config("tester.epsilon is required"))
        }
    }

    pub fn tolerances(&self) -> Result<(f64, f64)> {
        match (self.c_u, self.c_l) {
            (Some(u), Some(l)) => Ok((u, l)),
            _ => Err(HarnessError::config("tolerant testers need tester.c_u and tester.c_l")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default = "one_u64")]
    pub repetitions: u64,
    #[serde(default = "yes")]
    pub ground_truth: bool,
    /// Work cap for the exhaustive ground truth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub work_cap: Option<u64>,
    /// Wall times are left out of reports unless set, so reports stay
    /// byte-identical across runs.
    #[serde(default)]
    pub record_timings: bool,
    /// Runs repetitions concurrently. Each keeps its own seed and counter,
    /// so outputs match a sequential run.
    #[serde(default)]
    pub parallel_repetitions: bool,
    pub function: FunctionSpec,
    pub tester: TesterSpec,
    #[serde(default)]
    pub full: FullTesterConfig,
    #[serde(default)]
    pub gap: GapTesterConfig,
}

fn one() -> usize {
    1
}

fn one_u64() -> u64 {
    1
}

fn yes() -> bool {
    true
}

fn table_cap() -> usize {
    DEFAULT_TABLE_CAP
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| HarnessError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::config(format!("{}: {e}", path.display())))?;
        ExperimentConfig::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| HarnessError::config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let f = &self.function;
        let t = &self.tester;
        if self.repetitions == 0 {
            return Err(HarnessError::config("repetitions must be at least 1"));
        }
        if t.k == 0 || t.k > f.n {
            return Err(HarnessError::config(format!(
                "need n >= k >= 1, got n = {} and k = {}",
                f.n, t.k
            )));
        }
        if !(0.0..0.5).contains(&f.noise) {
            return Err(HarnessError::config(format!("noise must lie in [0, 1/2), got {}", f.noise)));
        }
        let planted = !matches!(f.family, Family::Random | Family::FromFile);
        if planted && (f.k_true == 0 || f.k_true > f.n) {
            return Err(HarnessError::config(format!(
                "need n >= k_true >= 1, got n = {} and k_true = {}",
                f.n, f.k_true
            )));
        }
        if f.family == Family::Dictator && f.k_true != 1 {
            return Err(HarnessError::config("a dictator has k_true = 1"));
        }
        if f.family == Family::FromFile && f.path.is_none() {
            return Err(HarnessError::config("from-file needs function.path"));
        }
        if f.family == Family::Random && f.n > f.table_cap {
            return Err(HarnessError::config("random functions are materialized; n exceeds table_cap"));
        }
        if f.noise_mode == NoiseMode::Exact && f.noise > 0.0 && f.n > f.table_cap {
            return Err(HarnessError::config("exact noise needs a materialized table"));
        }
        let eps = t.epsilon()?;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(HarnessError::config(format!("epsilon must lie in (0, 1), got {eps}")));
        }
        if t.which.is_tolerant() {
            let (u, l) = t.tolerances()?;
            if !(0.0 <= l && l < u && u < 0.5) {
                return Err(HarnessError::config(format!(
                    "need 0 <= c_l < c_u < 1/2, got c_l = {l}, c_u = {u}"
                )));
            }
        }
        Ok(())
    }

    /// Sets the dotted `key` to `value`, where `value` is any TOML value
    /// and falls back to a bare string.
    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<()> {
        let mut doc = toml::Value::try_from(&*self).map_err(|e| HarnessError::config(e.to_string()))?;
        let parsed = parse_value(value);
        let parts: Vec<&str> = key.split('.').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(HarnessError::config(format!("malformed override key '{key}'")));
        }
        let mut node = &mut doc;
        for part in &parts[..parts.len() - 1] {
            let table = node
                .as_table_mut()
                .ok_or_else(|| HarnessError::config(format!("'{key}' does not name a table field")))?;
            node = table
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(Default::default()));
        }
        node.as_table_mut()
            .ok_or_else(|| HarnessError::config(format!("'{key}' does not name a table field")))?
            .insert(parts[parts.len() - 1].to_string(), parsed.clone());
        let updated: ExperimentConfig = doc
            .try_into()
            .map_err(|e: toml::de::Error| HarnessError::config(format!("override '{key}': {e}")))?;
        // Nested tester sections ignore unknown keys, so confirm the value stuck.
        let echo = toml::Value::try_from(&updated).map_err(|e| HarnessError::config(e.to_string()))?;
        let mut found = Some(&echo);
        for part in &parts {
            found = found.and_then(|v| v.get(part));
        }
        if found.is_none() {
            return Err(HarnessError::config(format!("unknown config key '{key}'")));
        }
        updated.validate()?;
        *self = updated;
        Ok(())
    }

    /// Applies `key=value` strings in order.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| HarnessError::config(format!("override '{o}' is not key=value")))?;
            self.apply_override(k.trim(), v.trim())?;
        }
        Ok(())
    }
}

fn parse_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&wrapped) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}
