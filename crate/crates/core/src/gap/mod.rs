// SPDX-License-Identifier: Apache-2.0

//! The polynomial-query gap tester: averaging by random walk, smoothing,
//! influence thresholding, and the final projection.

pub mod influence;
pub mod pipeline;
pub mod smooth;
pub mod walk;

pub use influence::{
    coupon_expectation, influence_testing_sample, threshold_influences, InfluenceSample,
    ThresholdConfig, ThresholdOutcome,
};
pub use pipeline::{
    gap_arity, gap_tolerant_test, maximum_correlation_gap_junta, GapCounts, GapOutput, GapParams,
    GapTesterConfig,
};
pub use smooth::{smooth_query, SmoothedOracle};
pub use walk::{coordinate_projection, walk_chain, ProjectedOracle, WalkConfig, WalkStats};
