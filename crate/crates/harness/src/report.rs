// SPDX-License-Identifier: Apache-2.0

//! Report schema and its JSON and CSV forms.

use std::io::Write;

use junta_core::coord::Verdict;
use junta_core::full_tester::FullTesterParams;
use junta_core::gap::GapParams;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::gen::FunctionSummary;
use crate::truth::GroundTruth;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    Budget,
    Liveness,
    Capacity,
    Argument,
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub kind: ErrorKind,
    pub message: String,
}

impl ErrorRecord {
    pub fn from_error(e: &HarnessError) -> ErrorRecord {
        use junta_core::JuntaError as J;
        let kind = match e {
            HarnessError::Core(J::Budget { .. }) => ErrorKind::Budget,
            HarnessError::Core(J::Liveness { .. }) => ErrorKind::Liveness,
            HarnessError::Core(J::Capacity { .. }) => ErrorKind::Capacity,
            HarnessError::Core(J::Argument(_)) | HarnessError::Config(_) => ErrorKind::Argument,
            _ => ErrorKind::Other,
        };
        ErrorRecord {
            kind,
            message: e.to_string(),
        }
    }

    pub fn is_resource(&self) -> bool {
        matches!(self.kind, ErrorKind::Budget | ErrorKind::Liveness | ErrorKind::Capacity)
    }
}

/// Realized parameters of whichever tester ran.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TesterParams {
    Full(Box<FullTesterParams>),
    Gap(Box<GapParams>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TesterRecord {
    pub estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub oracle_count: usize,
    /// Indices into the constructed oracle set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen: Option<Vec<usize>>,
    /// The fitted junta as ±1 values, indexed like a truth table.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<i8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kept: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub influence_estimates: Option<Vec<f64>>,
    pub params: TesterParams,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepetitionRecord {
    pub index: u64,
    pub seed: u64,
    pub query_total: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<TesterRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
    /// Whether the output met the tolerance; absent when undetermined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub success: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub repetitions: u64,
    pub completed: u64,
    pub errors: u64,
    /// Repetitions for which success was determined.
    pub judged: u64,
    pub successes: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub success_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accept_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_estimate: Option<f64>,
    /// The rule success was judged by.
    pub tolerance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub function_seed: u64,
    pub config: ExperimentConfig,
    pub function: FunctionSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruth>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_truth_error: Option<ErrorRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_verdict: Option<Verdict>,
    pub repetitions: Vec<RepetitionRecord>,
    pub aggregate: Aggregate,
}

impl ExperimentReport {
    /// Canonical JSON: fields in declaration order, two-space indent.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| HarnessError::config(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// One flat row per repetition.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| HarnessError::Io(std::io::Error::other(e));
        for r in &self.repetitions {
            out.serialize(CsvRow {
                index: r.index,
                seed: r.seed,
                estimate: r.output.as_ref().map(|o| o.estimate),
                verdict: r.output.as_ref().and_then(|o| o.verdict),
                oracle_count: r.output.as_ref().map(|o| o.oracle_count),
                query_total: r.query_total,
                success: r.success,
                error_kind: r.error.as_ref().map(|e| e.kind.clone()),
                wall_ms: r.wall_ms,
                max_corr_k: self.ground_truth.as_ref().map(|t| t.max_corr_k),
                max_corr_k_prime: self.ground_truth.as_ref().and_then(|t| t.max_corr_k_prime),
            })
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    /// True when any repetition or the ground truth ran out of budget.
    pub fn has_resource_error(&self) -> bool {
        self.ground_truth_error.as_ref().is_some_and(ErrorRecord::is_resource)
            || self
                .repetitions
                .iter()
                .any(|r| r.error.as_ref().is_some_and(ErrorRecord::is_resource))
    }
}

#[derive(Serialize)]
struct CsvRow {
    index: u64,
    seed: u64,
    estimate: Option<f64>,
    verdict: Option<Verdict>,
    oracle_count: Option<usize>,
    query_total: u64,
    success: Option<bool>,
    error_kind: Option<ErrorKind>,
    wall_ms: Option<f64>,
    max_corr_k: Option<f64>,
    max_corr_k_prime: Option<f64>,
}
