// SPDX-License-Identifier: Apache-2.0

use junta_core::JuntaError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] JuntaError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    /// 2 for exhausted budgets and stuck samplers, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(e) if is_resource(e) => 2,
            _ => 1,
        }
    }
}

/// Budget, liveness and capacity errors.
pub fn is_resource(e: &JuntaError) -> bool {
    e.is_resource_error() || matches!(e, JuntaError::Capacity { .. })
}

pub type Result<T> = std::result::Result<T, HarnessError>;
