// SPDX-License-Identifier: Apache-2.0

//! Experiment harness for the junta testers: function generators, ground
//! truth, repetition runner and report emission.

pub mod config;
pub mod error;
pub mod gen;
pub mod report;
pub mod runner;
pub mod truth;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use report::ExperimentReport;
pub use runner::run_experiment;
