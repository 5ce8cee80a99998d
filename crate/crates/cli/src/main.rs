//! Command-line front end: validate state files, compute coherence
//! measures, lower-bound the coherence of assistance, decide saturation,
//! and simulate the one-way assisted distillation protocol.
//!
//! Exit codes: 0 success, 2 invalid input, 3 search exhausted,
//! 4 internal inconsistency.

mod report;
mod statefile;

use clap::{Parser, Subcommand, ValueEnum};
use cohassist::coherence::{
    maximize_assistance, regularized_assistance, CoherenceReport, OptimizerConfig,
};
use cohassist::protocol::{run_protocol, Mode, ProtocolConfig, ProtocolError, Strategy};
use cohassist::saturation::{saturation_pipeline, verify_certificate, PipelineConfig, Verdict};
use cohassist::states::{DensityMatrix, StateError};
use report::{EnsembleOut, InputInfo, Params, Results, RunReport, ToolInfo};
use statefile::{load_ensemble, load_state, FileError, LoadedState};
use std::process::ExitCode;

const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_SEARCH_EXHAUSTED: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "cohassist", version, about = "Coherence measures, saturation certificates, and assisted distillation for finite-dimensional quantum states")]
struct Cli {
    /// Numerical tolerance for validation and certificates.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Logarithm base for entropies and coherence values.
    #[arg(long, global = true, default_value_t = 2.0)]
    log_base: f64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Enumerate,
    Sample,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a state file.
    Validate { path: String },

    /// Report the relative-entropy coherence, l1 coherence, and the
    /// regularized coherence of assistance S(Δ(ρ)).
    Measures { path: String },

    /// Lower-bound the coherence of assistance by optimizing over
    /// pure-state decompositions.
    Assist {
        path: String,
        /// Decomposition size T (default: n·rank capped at n²).
        #[arg(long)]
        ensemble_size: Option<usize>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Decide whether the coherence of assistance saturates S(Δ(ρ)) and
    /// construct a witness decomposition.
    Saturate {
        path: String,
        /// Random phase-search candidates per ensemble size (0 disables
        /// the search; closed-form constructors still run).
        #[arg(long, default_value_t = 8)]
        budget: usize,
        /// Cap on the ensemble sizes tried by the phase search.
        #[arg(long = "max-T")]
        max_t: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Simulate the one-way assisted distillation protocol.
    Protocol {
        path: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Enumerate)]
        mode: ModeArg,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use this decomposition instead of the saturation pipeline.
        #[arg(long)]
        ensemble_file: Option<String>,
    },
}

struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: EXIT_INVALID_INPUT,
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: EXIT_INTERNAL,
        }
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        let named = match &e {
            FileError::Invalid { source, .. } => {
                format!("{}: {e}", invariant_name(source))
            }
            _ => e.to_string(),
        };
        Failure::invalid(named)
    }
}

fn invariant_name(e: &StateError) -> &'static str {
    match e {
        StateError::NotSquare { .. } => "NotSquare",
        StateError::NotHermitian { .. } => "NotHermitian",
        StateError::TraceNotOne { .. } => "TraceNotOne",
        StateError::NotPositive { .. } => "NotPositive",
        StateError::ZeroDiagonalInconsistency { .. } => "ZeroDiagonalInconsistency",
        StateError::NotNormalized { .. } => "NotNormalized",
        StateError::WeightsNotNormalized { .. } => "WeightsNotNormalized",
        StateError::WeightOutOfRange { .. } => "WeightOutOfRange",
        StateError::MalformedEnsemble => "MalformedEnsemble",
        StateError::BasisNotOrthonormal { .. } => "BasisNotOrthonormal",
        StateError::NotIsometry { .. } => "NotIsometry",
        StateError::Kernel(_) => "KernelError",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let argv: Vec<String> = std::env::args().collect();
    let tol = cli.tol;
    let log_base = cli.log_base;

    let (report, exit) = match &cli.command {
        Command::Validate { path } => {
            let loaded = load_state(path, tol)?;
            let results = Results::Validate {
                valid: true,
                dim: loaded.state.dim(),
                trace: loaded.state.matrix().trace().re,
                eigenvalues: loaded.state.spectrum().to_vec(),
            };
            (
                build_report(&argv, path, &loaded, tol, log_base, None, results, vec![]),
                ExitCode::SUCCESS,
            )
        }

        Command::Measures { path } => {
            let loaded = load_state(path, tol)?;
            let measures = CoherenceReport::measures_only(&loaded.state, log_base)
                .map_err(|e| Failure::internal(e.to_string()))?;
            let results = Results::from_measures(&measures);
            (
                build_report(&argv, path, &loaded, tol, log_base, None, results, vec![]),
                ExitCode::SUCCESS,
            )
        }

        Command::Assist {
            path,
            ensemble_size,
            restarts,
            seed,
        } => {
            let loaded = load_state(path, tol)?;
            let mut cfg = OptimizerConfig::default_for(&loaded.state).with_seed(*seed);
            cfg.restarts = *restarts;
            if let Some(t) = ensemble_size {
                cfg.ensemble_size = *t;
            }
            let (value, witness) = maximize_assistance(&loaded.state, &cfg, log_base)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            let ceiling = regularized_assistance(&loaded.state, log_base);
            let results = Results::Assist {
                lower_bound: value,
                c_a_infinity: ceiling,
                gap: ceiling - value,
                witness: EnsembleOut::from_ensemble(&witness),
            };
            (
                build_report(&argv, path, &loaded, tol, log_base, Some(*seed), results, vec![]),
                ExitCode::SUCCESS,
            )
        }

        Command::Saturate {
            path,
            budget,
            max_t,
            seed,
        } => {
            let loaded = load_state(path, tol)?;
            let n = loaded.state.dim();
            let sizes = phase_search_sizes(n, *max_t);
            let cfg = PipelineConfig {
                tol,
                seed: *seed,
                search_budget: *budget,
                ensemble_sizes: Some(sizes),
                attach_lower_bound: true,
                log_base,
            };
            let cert = saturation_pipeline(&loaded.state, &cfg)
                .map_err(|e| Failure::internal(e.to_string()))?;
            if cert.verdict == Verdict::Saturated
                && !verify_certificate(&cert, &loaded.state, log_base, tol)
            {
                return Err(Failure::internal(
                    "saturated certificate failed re-verification".to_string(),
                ));
            }
            let mut warnings = Vec::new();
            if cert.verdict == Verdict::Saturated
                && has_complex_off_diagonal(&loaded.state, tol)
                && matches!(
                    cert.method,
                    cohassist::saturation::Method::QutritReal
                        | cohassist::saturation::Method::NDimSignPattern
                )
            {
                warnings.push(
                    "diagonal-phase gauge applied to reduce the state to real form".to_string(),
                );
            }
            let exit = match cert.verdict {
                Verdict::Saturated => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_SEARCH_EXHAUSTED),
            };
            let results = Results::from_certificate(&cert);
            (
                build_report(&argv, path, &loaded, tol, log_base, Some(*seed), results, warnings),
                exit,
            )
        }

        Command::Protocol {
            path,
            mode,
            shots,
            seed,
            ensemble_file,
        } => {
            let loaded = load_state(path, tol)?;
            let (strategy, strategy_name) = match ensemble_file {
                Some(ens_path) => (
                    Strategy::UserEnsemble(load_ensemble(ens_path, tol)?),
                    "user-ensemble",
                ),
                None => (Strategy::AutoSaturate, "auto-saturate"),
            };
            let mode_val = match mode {
                ModeArg::Enumerate => Mode::Enumerate,
                ModeArg::Sample => Mode::Sample {
                    seed: *seed,
                    shots: *shots,
                },
            };
            let cfg = ProtocolConfig {
                tol,
                log_base,
                pipeline: PipelineConfig {
                    tol,
                    seed: *seed,
                    log_base,
                    ..PipelineConfig::default()
                },
            };
            let transcript = run_protocol(&loaded.state, strategy, mode_val, &cfg).map_err(
                |e| match e {
                    ProtocolError::NoDecompositionFound => Failure {
                        message: e.to_string(),
                        code: EXIT_SEARCH_EXHAUSTED,
                    },
                    ProtocolError::EnsembleMismatch { .. } | ProtocolError::State(_) => {
                        Failure::invalid(e.to_string())
                    }
                    other => Failure::internal(other.to_string()),
                },
            )?;
            let mut warnings = Vec::new();
            if transcript.used_fallback {
                warnings.push(
                    "saturation search failed; optimizer fallback decomposition used".to_string(),
                );
            }
            let results = Results::from_transcript(&transcript, strategy_name);
            (
                build_report(&argv, path, &loaded, tol, log_base, Some(*seed), results, warnings),
                ExitCode::SUCCESS,
            )
        }
    };

    match cli.format {
        Format::Machine => println!("{}", report::to_machine_json(&report)),
        Format::Human => print!("{}", report::to_human_text(&report)),
    }
    Ok(exit)
}

/// Escalation schedule n, 2n, n² (deduplicated), capped at `max_t`.
fn phase_search_sizes(n: usize, max_t: Option<usize>) -> Vec<usize> {
    let cap = max_t.unwrap_or(n * n).max(1);
    let mut sizes: Vec<usize> = [n, 2 * n, n * n]
        .into_iter()
        .map(|t| t.min(cap))
        .collect();
    sizes.dedup();
    sizes
}

fn has_complex_off_diagonal(rho: &DensityMatrix, tol: f64) -> bool {
    let n = rho.dim();
    for i in 0..n {
        for j in i + 1..n {
            if rho.entry(i, j).im.abs() > tol {
                return true;
            }
        }
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    argv: &[String],
    path: &str,
    loaded: &LoadedState,
    tol: f64,
    log_base: f64,
    seed: Option<u64>,
    results: Results,
    warnings: Vec<String>,
) -> RunReport {
    RunReport {
        tool: ToolInfo {
            name: "cohassist",
            version: env!("CARGO_PKG_VERSION"),
        },
        command: argv.to_vec(),
        input: InputInfo {
            path: path.to_string(),
            sha256: loaded.sha256.clone(),
            dim: loaded.state.dim(),
            label: loaded.label.clone(),
            comment: loaded.comment.clone(),
        },
        params: Params {
            tol,
            log_base,
            seed,
        },
        results,
        warnings,
    }
}
