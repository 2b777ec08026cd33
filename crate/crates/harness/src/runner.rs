// SPDX-License-Identifier: Apache-2.0

//! Runs an experiment and judges each repetition against ground truth.

use std::sync::Arc;
use std::time::Instant;

use junta_core::coord::Verdict;
use junta_core::full_tester::{maximum_correlation_junta, tolerant_test, TesterOutput};
use junta_core::gap::{gap_arity, gap_tolerant_test, maximum_correlation_gap_junta, GapOutput};
use junta_core::{rng_from_seed, BooleanFunction, BooleanOracle};

use crate::config::{ExperimentConfig, TesterKind};
use crate::error::{is_resource, HarnessError, Result};
use crate::gen::generate;
use crate::report::{Aggregate, ErrorRecord, ExperimentReport, RepetitionRecord, TesterParams, TesterRecord};
use crate::truth::{ground_truth, work_cap, GroundTruth};

/// Lower slack of the gap tester's success window, in units of `ε`.
pub const GAP_LOWER_SLACK: f64 = 2.5;

/// The verdict a tolerant tester must reach, when the instance is outside
/// the gap between `c_l` and `c_u`.
pub fn expected_verdict(kind: TesterKind, c_u: f64, c_l: f64, truth: &GroundTruth) -> Option<Verdict> {
    let far = if kind.is_gap() {
        truth.distance_k_prime?
    } else {
        truth.distance_k
    };
    if truth.distance_k <= c_l {
        Some(Verdict::Accept)
    } else if far >= c_u {
        Some(Verdict::Reject)
    } else {
        None
    }
}

fn tolerance_rule(kind: TesterKind) -> &'static str {
    match kind {
        TesterKind::Full => "|estimate - max_corr_k| <= epsilon",
        TesterKind::Gap => "max_corr_k - 2.5 epsilon <= estimate <= max_corr_k_prime + epsilon",
        TesterKind::TolerantFull => "accept if distance_k <= c_l, reject if distance_k >= c_u",
        TesterKind::TolerantGap => "accept if distance_k <= c_l, reject if distance_k_prime >= c_u",
    }
}

fn full_record(out: TesterOutput, verdict: Option<Verdict>, threshold: Option<f64>) -> TesterRecord {
    TesterRecord {
        estimate: out.corr_hat,
        verdict,
        threshold,
        oracle_count: out.oracle_count,
        chosen: Some(out.chosen),
        h: Some(out.h.to_reals().iter().map(|&v| v as i8).collect()),
        kept: None,
        influence_estimates: None,
        params: TesterParams::Full(Box::new(out.params)),
    }
}

fn gap_record(out: GapOutput, verdict: Option<Verdict>, threshold: Option<f64>) -> TesterRecord {
    TesterRecord {
        estimate: out.estimate,
        verdict,
        threshold,
        oracle_count: out.params.oracle_count,
        chosen: None,
        h: None,
        kept: Some(out.kept),
        influence_estimates: Some(out.influence_estimates),
        params: TesterParams::Gap(Box::new(out.params)),
    }
}

fn run_tester(config: &ExperimentConfig, f: &BooleanOracle, seed: u64) -> Result<TesterRecord> {
    let t = &config.tester;
    let mut rng = rng_from_seed(seed);
    Ok(match t.which {
        TesterKind::Full => {
            let out = maximum_correlation_junta(f, t.k, t.epsilon()?, &config.full, &mut rng)?;
            full_record(out, None, None)
        }
        TesterKind::Gap => {
            let out = maximum_correlation_gap_junta(f, t.k, t.epsilon()?, &config.gap, &mut rng)?;
            gap_record(out, None, None)
        }
        TesterKind::TolerantFull => {
            let (u, l) = t.tolerances()?;
            let d = tolerant_test(f, t.k, u, l, &config.full, &mut rng)?;
            full_record(d.output, Some(d.verdict), Some(d.threshold))
        }
        TesterKind::TolerantGap => {
            let (u, l) = t.tolerances()?;
            let d = gap_tolerant_test(f, t.k, u, l, &config.gap, &mut rng)?;
            gap_record(d.output, Some(d.verdict), Some(d.threshold))
        }
    })
}

fn judge(
    config: &ExperimentConfig,
    out: &TesterRecord,
    truth: Option<&GroundTruth>,
    expected: Option<Verdict>,
) -> Option<bool> {
    let t = &config.tester;
    let eps = t.epsilon().ok()?;
    match t.which {
        TesterKind::Full => Some((out.estimate - truth?.max_corr_k).abs() <= eps),
        TesterKind::Gap => {
            let truth = truth?;
            let upper = truth.max_corr_k_prime?;
            let lower = truth.max_corr_k - GAP_LOWER_SLACK * eps;
            Some(out.estimate >= lower && out.estimate <= upper + eps)
        }
        TesterKind::TolerantFull | TesterKind::TolerantGap => Some(out.verdict? == expected?),
    }
}

fn repetition(
    config: &ExperimentConfig,
    func: &Arc<dyn BooleanFunction>,
    index: u64,
    truth: Option<&GroundTruth>,
    expected: Option<Verdict>,
) -> RepetitionRecord {
    let seed = config.seed.wrapping_add(index);
    // A fresh oracle per repetition keeps the counters separate.
    let oracle = BooleanOracle::from_arc(func.clone());
    let start = Instant::now();
    let result = run_tester(config, &oracle, seed);
    let wall = start.elapsed().as_secs_f64() * 1e3;
    let (output, error) = match result {
        Ok(o) => (Some(o), None),
        Err(e) => (None, Some(ErrorRecord::from_error(&e))),
    };
    RepetitionRecord {
        index,
        seed,
        query_total: oracle.query_count(),
        success: output.as_ref().and_then(|o| judge(config, o, truth, expected)),
        output,
        error,
        wall_ms: config.record_timings.then_some(wall),
    }
}

fn run_repetitions(
    config: &ExperimentConfig,
    func: &Arc<dyn BooleanFunction>,
    truth: Option<&GroundTruth>,
    expected: Option<Verdict>,
) -> Vec<RepetitionRecord> {
    let one = |i: u64| repetition(config, func, i, truth, expected);
    #[cfg(feature = "parallel")]
    if config.parallel_repetitions {
        use rayon::prelude::*;
        return (0..config.repetitions).into_par_iter().map(one).collect();
    }
    (0..config.repetitions).map(one).collect()
}

fn aggregate(config: &ExperimentConfig, reps: &[RepetitionRecord]) -> Aggregate {
    let done: Vec<&TesterRecord> = reps.iter().filter_map(|r| r.output.as_ref()).collect();
    let judged: Vec<bool> = reps.iter().filter_map(|r| r.success).collect();
    let verdicts: Vec<Verdict> = done.iter().filter_map(|o| o.verdict).collect();
    let frac = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    let successes = judged.iter().filter(|&&s| s).count();
    let accepts = verdicts.iter().filter(|&&v| v == Verdict::Accept).count();
    Aggregate {
        repetitions: reps.len() as u64,
        completed: done.len() as u64,
        errors: (reps.len() - done.len()) as u64,
        judged: judged.len() as u64,
        successes: successes as u64,
        success_fraction: frac(successes, judged.len()),
        accept_fraction: frac(accepts, verdicts.len()),
        mean_estimate: (!done.is_empty())
            .then(|| done.iter().map(|o| o.estimate).sum::<f64>() / done.len() as f64),
        tolerance: tolerance_rule(config.tester.which).to_string(),
    }
}

/// Generates the function, computes ground truth when enabled, and runs
/// every repetition. Repetition `i` uses seed `seed + i`; a failing
/// repetition is recorded and the rest still run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let function_seed = config.function.seed.unwrap_or(config.seed);
    let generated = generate(&config.function, function_seed)?;
    let t = &config.tester;
    let eps = t.epsilon()?;
    let k_prime = t.which.is_gap().then(|| gap_arity(t.k, eps, config.function.n));
    let (truth, truth_error) = if config.ground_truth {
        match ground_truth(&generated, t.k, k_prime, work_cap(config.work_cap)?) {
            Ok(v) => (v, None),
            Err(HarnessError::Core(e)) if is_resource(&e) => {
                (None, Some(ErrorRecord::from_error(&HarnessError::Core(e))))
            }
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };
    let expected = match (t.which.is_tolerant(), &truth) {
        (true, Some(tr)) => {
            let (u, l) = t.tolerances()?;
            expected_verdict(t.which, u, l, tr)
        }
        _ => None,
    };
    let reps = run_repetitions(config, &generated.func, truth.as_ref(), expected);
    Ok(ExperimentReport {
        seed: config.seed,
        function_seed,
        config: config.clone(),
        function: generated.summary,
        ground_truth: truth,
        ground_truth_error: truth_error,
        expected_verdict: expected,
        aggregate: aggregate(config, &reps),
        repetitions: reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(which: &str, extra: &str) -> ExperimentConfig {
        let text = format!(
            r#"
seed = 3
repetitions = 2

[function]
family = "dictator"
n = 8

[tester]
which = "{which}"
k = 1
{extra}

[full.construction]
kappa = 1.0
outer_loops = 1
inner_loops = 16
hastad_gamma = 0.05
per_call_delta = 0.001
dedup_points = 32

[full.construction.dictator]
linearity_constant = 0.25
pair_constant = 2.0
noise_constant = 8.0

[full.best_fit]
samples = 200
eval_delta = 0.001

[full]
nu = 0.125

[gap]
average_steps = 2
smoothing_samples = 2
influence_points = 8
final_steps = 2
final_samples = 16

[gap.construction]
kappa = 1.0
outer_loops = 1
inner_loops = 16
hastad_gamma = 0.05
per_call_delta = 0.001
dedup_points = 32
"#
        );
        ExperimentConfig::from_toml(&text).unwrap()
    }

    #[test]
    fn query_totals_are_counter_deltas() {
        let report = run_experiment(&config("full", "epsilon = 0.2")).unwrap();
        assert_eq!(report.repetitions.len(), 2);
        for r in &report.repetitions {
            assert!(r.query_total > 0);
            assert!(r.wall_ms.is_none());
            let TesterParams::Full(p) = &r.output.as_ref().unwrap().params else {
                panic!("full params expected")
            };
            assert_eq!(p.construction_stats.declared_queries, p.construction_stats.observed_queries);
        }
        assert_eq!(report.repetitions[1].seed, 4);
    }

    #[test]
    fn tolerant_dictator_is_expected_to_pass() {
        let report = run_experiment(&config("tolerant-gap", "c_u = 0.3\nc_l = 0.1")).unwrap();
        assert_eq!(report.expected_verdict, Some(Verdict::Accept));
        assert_eq!(report.ground_truth.as_ref().unwrap().k_prime, Some(8));
    }

    #[test]
    fn resource_errors_are_recorded_per_repetition() {
        let mut cfg = config("full", "epsilon = 0.2");
        cfg.apply_override("full.construction.max_candidates", "1").unwrap();
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.aggregate.errors, 2);
        assert!(report.has_resource_error());
    }
}
