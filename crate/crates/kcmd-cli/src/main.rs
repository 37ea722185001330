//! Command line front end: dataset tests, raw estimates, Monte Carlo
//! studies, and weight-sequence inspection, all emitting pretty JSON.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data error,
//! 4 numerical degeneracy.

use clap::{Parser, Subcommand};
use kcmd::estimators::estimate_bundle;
use kcmd::inference::run_test;
use kcmd::io::{load_config, load_manifest, load_sample, load_scenario, RunConfig, WeightConfig};
use kcmd::kernels::GramPair;
use kcmd::simulate::monte_carlo;
use kcmd::Error;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "kcmd",
    version,
    about = "Kernel-based conditional mean dependence: estimation, testing, simulation"
)]
struct Cli {
    /// Worker threads for simulation (default: KCMD_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test conditional mean independence on a dataset.
    Test {
        /// Dataset manifest (JSON).
        #[arg(long)]
        manifest: PathBuf,
        /// Run configuration (JSON); defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the result here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compute every estimator on a dataset without a decision.
    Estimate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a Monte Carlo study described by a scenario file.
    Simulate {
        /// Scenario description (JSON).
        #[arg(long)]
        scenario: PathBuf,
        /// Number of replicates.
        #[arg(long, default_value_t = 1000)]
        replicates: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print a weight sequence, or check its certificate conditions.
    Weights {
        /// Family name: alternating, sinusoidal, or constant_one.
        #[arg(long)]
        family: String,
        /// Family parameter in (0, 1).
        #[arg(long)]
        gamma: Option<f64>,
        /// Sequence length (or largest n checked with --verify).
        #[arg(long)]
        n: usize,
        /// Check the certificate conditions up to n instead of printing.
        #[arg(long)]
        verify: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(message) = configure_threads(cli.threads) {
        eprintln!("error: {message}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

// === dispatch ===

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Test {
            manifest,
            config,
            output,
        } => {
            let (sample, config) = load_inputs(&manifest, config.as_deref())?;
            let kernel = config.kernel.to_kernel_choice()?.resolve(&sample)?;
            let family = config.weights.to_weight_family()?;
            let result = run_test(&sample, &kernel, &family, config.alpha)?;
            emit(&result, output.or(config.output))
        }
        Command::Estimate {
            manifest,
            config,
            output,
        } => {
            let (sample, config) = load_inputs(&manifest, config.as_deref())?;
            let kernel = config.kernel.to_kernel_choice()?.resolve(&sample)?;
            let family = config.weights.to_weight_family()?;
            let grams = GramPair::new(&kernel, &sample)?;
            let bundle = estimate_bundle(&grams, &family)?;
            emit(&bundle, output.or(config.output))
        }
        Command::Simulate {
            scenario,
            replicates,
            config,
            output,
        } => {
            let mut scenario = load_scenario(&scenario)?;
            let config = optional_config(config.as_deref())?;
            if let Some(seed) = config.seed {
                scenario.seed = seed;
            }
            let kernel = config.kernel.to_kernel_choice()?;
            let family = config.weights.to_weight_family()?;
            let report = monte_carlo(&scenario, replicates, &kernel, &family, config.alpha)?;
            emit(&report, output.or(config.output))
        }
        Command::Weights {
            family,
            gamma,
            n,
            verify,
        } => {
            let spec = WeightConfig { family, gamma };
            let family = spec.to_weight_family()?;
            if verify {
                emit(&family.verify_conditions(n), None)
            } else {
                emit(&family.generate(n), None)
            }
        }
    }
}

fn load_inputs(manifest: &std::path::Path, config: Option<&std::path::Path>) -> Result<(kcmd::Sample, RunConfig), Error> {
    let manifest = load_manifest(manifest)?;
    let sample = load_sample(&manifest)?;
    Ok((sample, optional_config(config)?))
}

fn optional_config(path: Option<&std::path::Path>) -> Result<RunConfig, Error> {
    match path {
        Some(path) => load_config(path),
        None => Ok(RunConfig::default()),
    }
}

fn emit<T: Serialize>(value: &T, output: Option<PathBuf>) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

// === process plumbing ===

/// Builds the global worker pool from --threads or KCMD_THREADS. Explicit
/// but unusable values are usage errors; an already-built pool is not.
fn configure_threads(flag: Option<usize>) -> Result<(), String> {
    let requested = match flag {
        Some(n) => Some(n),
        None => match std::env::var("KCMD_THREADS") {
            Ok(raw) => Some(
                raw.parse::<usize>()
                    .map_err(|_| format!("KCMD_THREADS is not a thread count: {raw:?}"))?,
            ),
            Err(_) => None,
        },
    };
    match requested {
        Some(0) => Err("thread count must be at least 1".into()),
        Some(n) => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            Ok(())
        }
        None => Ok(()),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::DegenerateSample
        | Error::DegenerateVariance { .. }
        | Error::TooManyDegenerate { .. } => 4,
        Error::Parse { .. }
        | Error::Json { .. }
        | Error::Io(_)
        | Error::RowCountMismatch { .. }
        | Error::GridViolation(_)
        | Error::ShapeMismatch(_)
        | Error::NonFinite(_) => 3,
        _ => 2,
    }
}
