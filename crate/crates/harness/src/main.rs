// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use junta_core::gap::gap_arity;
use junta_core::wht;
use junta_probe::config::{Family, FunctionSpec, NoiseMode, DEFAULT_TABLE_CAP};
use junta_probe::error::{HarnessError, Result};
use junta_probe::gen::{generate, FunctionSummary};
use junta_probe::truth::{ground_truth, work_cap, GroundTruth};
use junta_probe::{run_experiment, ExperimentConfig};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "junta-probe", version, about = "Run junta-testing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Dotted `key=value` overriding a config field; repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// JSON report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write flat per-repetition CSV rows here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print exhaustive ground truth for a function.
    Truth {
        /// A BFN1 file, or `family:key=value,...` such as `majority:n=9,k_true=3`.
        #[arg(long = "fn", value_name = "FILE|SPEC")]
        function: String,
        #[arg(long)]
        k: usize,
        /// Also report arity k' = min(ceil(k²/ε²), n).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Write the Fourier spectrum as `mask,coefficient` CSV.
        #[arg(long)]
        spectrum: Option<PathBuf>,
    },
    /// Generate a function and write it as a BFN1 table.
    Gen {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k_true: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, value_parser = parse_noise_mode, default_value = "independent")]
        noise_mode: NoiseMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    toml::Value::String(s.to_string())
        .try_into()
        .map_err(|_| format!("unknown family '{s}'"))
}

fn parse_noise_mode(s: &str) -> std::result::Result<NoiseMode, String> {
    toml::Value::String(s.to_string())
        .try_into()
        .map_err(|_| format!("unknown noise mode '{s}'"))
}

/// Parses `family:key=value,...` into a function spec.
fn parse_spec(s: &str) -> Result<FunctionSpec> {
    let (family, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut lines = vec![format!("family = \"{family}\"")];
    for pair in rest.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| HarnessError::config(format!("'{pair}' is not key=value")))?;
        let v = v.trim();
        let quoted = if v.parse::<f64>().is_ok() {
            v.to_string()
        } else {
            format!("\"{v}\"")
        };
        lines.push(format!("{} = {quoted}", k.trim()));
    }
    let spec: FunctionSpec = toml::from_str(&lines.join("\n")).map_err(|e| HarnessError::config(e.to_string()))?;
    Ok(spec)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| HarnessError::config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct TruthReport {
    function: FunctionSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    ground_truth: Option<GroundTruth>,
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            overrides,
            out,
            csv,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            cfg.apply_overrides(&overrides)?;
            let report = run_experiment(&cfg)?;
            write_out(out.as_deref(), &report.to_json()?)?;
            if let Some(p) = csv {
                report.write_csv(BufWriter::new(File::create(p)?))?;
            }
            for r in &report.repetitions {
                if let Some(e) = &r.error {
                    eprintln!("repetition {}: {}", r.index, e.message);
                }
            }
            if let Some(e) = &report.ground_truth_error {
                eprintln!("ground truth: {}", e.message);
            }
            Ok(ExitCode::from(if report.has_resource_error() { 2 } else { 0 }))
        }
        Command::Truth {
            function,
            k,
            epsilon,
            spectrum,
        } => {
            let spec = if Path::new(&function).is_file() {
                let t = junta_core::TruthTable::read_bfn1(std::io::BufReader::new(File::open(&function)?))?;
                FunctionSpec {
                    family: Family::FromFile,
                    n: t.dimension(),
                    k_true: 1,
                    noise: 0.0,
                    noise_mode: NoiseMode::Independent,
                    seed: None,
                    path: Some(function.into()),
                    table_cap: DEFAULT_TABLE_CAP.max(t.dimension()),
                }
            } else {
                parse_spec(&function)?
            };
            if k == 0 || k > spec.n {
                return Err(HarnessError::config(format!("need n >= k >= 1, got n = {} and k = {k}", spec.n)));
            }
            let g = generate(&spec, spec.seed.unwrap_or(0))?;
            let k_prime = epsilon.map(|e| gap_arity(k, e, spec.n));
            let truth = ground_truth(&g, k, k_prime, work_cap(None)?)?;
            if truth.is_none() {
                eprintln!("no exact ground truth: the function is implicit and noisy");
            }
            if let Some(p) = spectrum {
                let t = g
                    .table
                    .as_ref()
                    .ok_or_else(|| HarnessError::config("spectrum export needs a materialized table"))?;
                wht(&t.to_reals())?.write_csv(BufWriter::new(File::create(p)?))?;
            }
            write_out(
                None,
                &json(&TruthReport {
                    function: g.summary,
                    ground_truth: truth,
                })?,
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen {
            family,
            n,
            k_true,
            noise,
            noise_mode,
            seed,
            out,
        } => {
            let spec = FunctionSpec {
                family,
                n,
                k_true,
                noise,
                noise_mode,
                seed: Some(seed),
                path: None,
                table_cap: DEFAULT_TABLE_CAP,
            };
            if family == Family::FromFile {
                return Err(HarnessError::config("gen cannot read from a file"));
            }
            if !(0.0..0.5).contains(&noise) || k_true == 0 || k_true > n {
                return Err(HarnessError::config("need n >= k_true >= 1 and noise in [0, 1/2)"));
            }
            let g = generate(&spec, seed)?;
            let t = g
                .table
                .as_ref()
                .ok_or_else(|| HarnessError::config(format!("n = {n} exceeds the table cap {DEFAULT_TABLE_CAP}")))?;
            let mut w = BufWriter::new(File::create(&out)?);
            t.write_bfn1(&mut w)?;
            w.flush()?;
            write_out(None, &json(&g.summary)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    // Usage errors are config errors, so they exit 1 rather than clap's 2.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
