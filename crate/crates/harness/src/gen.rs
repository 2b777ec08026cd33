// SPDX-License-Identifier: Apache-2.0

//! Function generators for the experiment families.

use std::fs::File;
use std::io::BufReader;
use std::sync::Arc;

use junta_core::functions::{tabulate, Dictator, HashedNoise, JuntaTable, Majority, Parity};
use junta_core::{rng_from_seed, BooleanFunction, JuntaRng, Sign, TruthTable};
use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use crate::config::{Family, FunctionSpec, NoiseMode};
use crate::error::{HarnessError, Result};

/// The junta a function was built from, before noise.
#[derive(Clone, Debug)]
pub struct Planted {
    pub coords: Vec<usize>,
    /// Bit `j` of the index is coordinate `coords[j]`.
    pub local: TruthTable,
}

pub struct Generated {
    pub func: Arc<dyn BooleanFunction>,
    /// Present whenever `n` is within the table cap.
    pub table: Option<TruthTable>,
    pub planted: Option<Planted>,
    pub summary: FunctionSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionSummary {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planted_coords: Option<Vec<usize>>,
    pub materialized: bool,
    /// Fraction of labels flipped in the table, or the nominal rate when
    /// noise is applied by hashing.
    pub realized_noise: f64,
}

fn random_table(n: usize, rng: &mut JuntaRng) -> Result<TruthTable> {
    Ok(TruthTable::from_fn(n, |_| Sign::from_bit(rng.random()))?)
}

/// A uniform table on `k` inputs conditioned on every input mattering, so
/// the planted junta has exactly `k` relevant coordinates.
fn relevant_table(k: usize, rng: &mut JuntaRng) -> Result<TruthTable> {
    loop {
        let t = random_table(k, rng)?;
        let relevant = (0..k).all(|i| (0..t.len() as u64).any(|x| t.get(x) != t.get(x ^ (1 << i))));
        if relevant {
            return Ok(t);
        }
    }
}

fn planted(spec: &FunctionSpec, rng: &mut JuntaRng) -> Result<Option<Planted>> {
    let k = spec.k_true;
    let first: Vec<usize> = (0..k).collect();
    let p = match spec.family {
        Family::Dictator => Planted {
            coords: vec![0],
            local: tabulate(&Dictator::new(1, 0))?,
        },
        Family::Parity => Planted {
            coords: first,
            local: tabulate(&Parity {
                n: k,
                coords: (0..k).collect(),
            })?,
        },
        Family::Majority => {
            if k % 2 == 0 {
                return Err(HarnessError::config("majority needs an odd k_true"));
            }
            Planted {
                coords: first,
                local: tabulate(&Majority {
                    n: k,
                    coords: (0..k).collect(),
                })?,
            }
        }
        Family::NoisyJunta => {
            let mut coords = sample(rng, spec.n, k).into_vec();
            coords.sort_unstable();
            Planted {
                coords,
                local: relevant_table(k, rng)?,
            }
        }
        Family::Random | Family::FromFile => return Ok(None),
    };
    Ok(Some(p))
}

/// Draws the function described by `spec`, using `seed` for every random
/// choice.
pub fn generate(spec: &FunctionSpec, seed: u64) -> Result<Generated> {
    let mut rng = rng_from_seed(seed);
    let n = spec.n;
    let planted = planted(spec, &mut rng)?;
    let base: Option<Arc<dyn BooleanFunction>> = planted.as_ref().map(|p| {
        Arc::new(JuntaTable {
            n,
            coords: p.coords.clone(),
            table: p.local.clone(),
        }) as Arc<dyn BooleanFunction>
    });
    let clean = match spec.family {
        Family::Random => Some(random_table(n, &mut rng)?),
        Family::FromFile => {
            let path = spec.path.as_ref().ok_or_else(|| HarnessError::config("from-file needs function.path"))?;
            let t = TruthTable::read_bfn1(BufReader::new(File::open(path)?))?;
            if t.dimension() != n {
                return Err(HarnessError::config(format!(
                    "{} has dimension {}, config says {n}",
                    path.display(),
                    t.dimension()
                )));
            }
            Some(t)
        }
        _ if n <= spec.table_cap => Some(tabulate(base.as_deref().expect("planted family"))?),
        _ => None,
    };
    let (func, table, realized): (Arc<dyn BooleanFunction>, _, _) = match clean {
        Some(mut t) => {
            let flipped = flip(&mut t, spec.noise, spec.noise_mode, &mut rng);
            let realized = flipped as f64 / t.len() as f64;
            (Arc::new(t.clone()), Some(t), realized)
        }
        None if spec.noise > 0.0 => {
            if spec.noise_mode == NoiseMode::Exact {
                return Err(HarnessError::config("exact noise needs a materialized table"));
            }
            let noisy = HashedNoise {
                inner: ArcFunction(base.expect("planted family")),
                rate: spec.noise,
                key: rng.random(),
            };
            (Arc::new(noisy), None, spec.noise)
        }
        None => (base.expect("planted family"), None, 0.0),
    };
    let summary = FunctionSummary {
        n,
        planted_coords: planted.as_ref().map(|p| p.coords.clone()),
        materialized: table.is_some(),
        realized_noise: realized,
    };
    Ok(Generated {
        func,
        table,
        planted,
        summary,
    })
}

/// Flips labels of `t` and returns how many flipped.
fn flip(t: &mut TruthTable, rate: f64, mode: NoiseMode, rng: &mut JuntaRng) -> usize {
    if rate == 0.0 {
        return 0;
    }
    let size = t.len();
    let points: Vec<usize> = match mode {
        NoiseMode::Independent => (0..size).filter(|_| rng.random::<f64>() < rate).collect(),
        NoiseMode::Exact => {
            let count = (rate * size as f64).round() as usize;
            sample(rng, size, count).into_vec()
        }
    };
    for &x in &points {
        let v = t.get(x as u64);
        t.set(x as u64, -v);
    }
    points.len()
}

struct ArcFunction(Arc<dyn BooleanFunction>);

impl BooleanFunction for ArcFunction {
    fn dimension(&self) -> usize {
        self.0.dimension()
    }
    fn eval(&self, x: &junta_core::Point) -> Sign {
        self.0.eval(x)
    }
}
