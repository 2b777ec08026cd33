// SPDX-License-Identifier: Apache-2.0

//! Tolerant junta testing over the Boolean cube.

pub mod best_fit;
pub mod coord;
pub mod error;
pub mod estimate;
pub mod full_tester;
pub mod functions;
pub mod gap;
pub mod ground_truth;
pub mod noise;
pub mod oracle;
pub mod par;
pub mod point;
pub mod restriction;
pub mod rng;
pub mod spectrum;
pub mod table;

pub use error::{JuntaError, Result};
pub use noise::NoiseVector;
pub use oracle::{BooleanFunction, BooleanOracle, RealOracle};
pub use par::Execution;
pub use point::{Point, Sign};
pub use restriction::Restriction;
pub use rng::{rng_from_seed, JuntaRng};
pub use spectrum::{wht, FourierSpectrum};
pub use table::{RealTable, TruthTable};
