// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error)]
pub enum JuntaError {
    /// Exact machinery refused a dimension above its cap.
    #[error("dimension {n} exceeds the exact-computation cap {cap}")]
    Capacity { n: usize, cap: usize },

    /// A derived loop count or enumeration exceeds the configured work budget.
    #[error("work budget exceeded in {stage}: {detail} (budget {budget})")]
    Budget {
        stage: &'static str,
        detail: String,
        budget: u64,
    },

    /// A rejection-sampling loop hit its hard proposal cap.
    #[error("liveness cap hit in {stage}: {proposals} proposals without completing (cap {cap})")]
    Liveness {
        stage: &'static str,
        proposals: u64,
        cap: u64,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("malformed truth-table file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl JuntaError {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        JuntaError::Argument(msg.into())
    }

    /// True for the errors that signal an exhausted budget or a stuck sampler.
    pub fn is_resource_error(&self) -> bool {
        matches!(self, JuntaError::Budget { .. } | JuntaError::Liveness { .. })
    }
}

pub type Result<T> = std::result::Result<T, JuntaError>;
