// SPDX-License-Identifier: Apache-2.0

//! Coordinate oracles: randomized functions that each track one relevant
//! variable of `f` up to sign.

pub mod candidate;
pub mod construct;
pub mod hastad;

pub use candidate::{
    make_candidate, CandidateDictator, CandidateSettings, CoordinateOracle, ExactDictator,
};
pub use construct::{
    construct_coordinate_oracle, construction_params, dedup_by_correlation, Construction,
    ConstructionConfig, ConstructionParams, ConstructionStats, CoordinateOracleSet,
};
pub use dictator_test::{dictator_test, DictatorTestConfig, DictatorTestReport, Stage, Verdict};
pub use hastad::{estimate_hastad, sample_eta};
