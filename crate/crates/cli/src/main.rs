//! Command-line surface for interval-valued quantum probability measures:
//! validation, classification, core search, expectation intervals, the
//! parity-square demonstration, the contextuality sweep, the distance
//! bound, and interval-map checking.
//!
//! Exit codes: 0 = valid / pass, 1 = invalid measure or failed check,
//! 2 = malformed input. Outputs are deterministic for a fixed seed.

mod inputs;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use inputs::{EXIT_BAD_INPUT, EXIT_INVALID, EXIT_OK};
use qivpm_core::{
    delta_sweep, expectation_interval, find_core_member, gleason_bound_check,
    refute_delta_deterministic, ultramodular_check, CoreQuery, EventSpace, Interval, SolverParams,
};

#[derive(Parser)]
#[command(
    name = "qivpm",
    version,
    about = "Interval-valued quantum probability measures: validate, classify, solve"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the primary report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the measure axioms; reports every violation.
    Validate {
        measure: PathBuf,
        /// Tolerance for interval comparisons.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Least determinacy level delta* of a valid measure.
    Classify {
        measure: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Search for a state consistent with the measure on a subspace.
    Core {
        measure: PathBuf,
        /// `all`, or comma-separated member indices; the least closed
        /// subspace containing the selected members is used.
        #[arg(long, default_value = "all")]
        subspace: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Solver tolerance (maximum constraint violation of a witness).
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Interval of expectation values of an observable over the core.
    Expect {
        measure: PathBuf,
        /// JSON file holding the observable's Hermitian matrix.
        observable: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Cap on the generated minimal subspace.
        #[arg(long, default_value_t = 4096)]
        cap: usize,
    },
    /// Print the exhaustive parity-square refutation transcript.
    KsDemo,
    /// Contextuality verdict per determinacy level; emits CSV.
    Sweep {
        /// `start:end:step` (inclusive) or a comma-separated list.
        grid: String,
        #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
        format: String,
        /// Directory for the evidence transcripts referenced by the rows;
        /// defaults to the output file's directory when --out is given.
        #[arg(long)]
        evidence_dir: Option<PathBuf>,
    },
    /// Distance bound between a blurred state measure and found core members.
    Gleason {
        /// JSON file holding the generating density matrix.
        rho: PathBuf,
        /// Map spec: sharp | three-valued | clamp:W | table:FILE.
        #[arg(long)]
        map: String,
        /// Event space file; defaults to the bundled 64-event probe space
        /// (d = 3 only).
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        starts: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Grid check of the interval-map axioms.
    Ultra {
        #[arg(long)]
        map: String,
        /// Grid step in (0, 0.1].
        #[arg(long, default_value_t = 0.015625)]
        step: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Validate { measure, tol } => {
            let m = inputs::load_measure(measure)?;
            let report = m.validate(*tol);
            emit_json(&cli.out, &report)?;
            Ok(if report.valid { EXIT_OK } else { EXIT_INVALID })
        }
        Command::Classify { measure, tol } => {
            let m = inputs::load_measure(measure)?;
            let report = m.validate(*tol);
            if !report.valid {
                emit_json(&cli.out, &report)?;
                return Ok(EXIT_INVALID);
            }
            #[derive(Serialize)]
            struct Classified {
                valid: bool,
                delta: f64,
            }
            emit_json(&cli.out, &Classified { valid: true, delta: m.delta_classify() })?;
            Ok(EXIT_OK)
        }
        Command::Core { measure, subspace, seed, tol } => {
            let m = inputs::load_measure(measure)?;
            let report = m.validate(qivpm_core::DEFAULT_TOL);
            if !report.valid {
                emit_json(&cli.out, &report)?;
                return Ok(EXIT_INVALID);
            }
            let query = match inputs::parse_subspace(subspace, m.space())? {
                None => CoreQuery::new(m),
                Some(indices) => {
                    let gens: Vec<_> = indices
                        .iter()
                        .map(|&i| m.space().member(i).clone())
                        .collect();
                    let sub = EventSpace::generate(m.space().dim(), &gens, m.space().len())
                        .map_err(|e| anyhow!("subspace closure failed: {e}"))?;
                    CoreQuery::with_subspace(m, sub).map_err(|e| anyhow!("{e}"))?
                }
            };
            let result = find_core_member(&query.seed(*seed).tolerance(*tol))
                .map_err(|e| anyhow!("core search failed: {e}"))?;
            emit_json(&cli.out, &result)?;
            Ok(EXIT_OK)
        }
        Command::Expect { measure, observable, seed, tol, cap } => {
            let m = inputs::load_measure(measure)?;
            let report = m.validate(qivpm_core::DEFAULT_TOL);
            if !report.valid {
                emit_json(&cli.out, &report)?;
                return Ok(EXIT_INVALID);
            }
            let o = inputs::load_observable(observable)?;
            let params =
                SolverParams { seed: *seed, tolerance: *tol, cap: *cap, ..SolverParams::default() };
            match expectation_interval(&m, &o, &params) {
                Ok(interval) => {
                    #[derive(Serialize)]
                    struct Expectation {
                        interval: Interval,
                    }
                    emit_json(&cli.out, &Expectation { interval })?;
                    Ok(EXIT_OK)
                }
                Err(e @ qivpm_core::Error::CoreUnavailable { .. }) => {
                    eprintln!("error: {e}");
                    Ok(EXIT_INVALID)
                }
                Err(e) => Err(anyhow!("expectation failed: {e}")),
            }
        }
        Command::KsDemo => {
            let report = refute_delta_deterministic(0.0)
                .map_err(|e| anyhow!("demonstration failed: {e}"))?;
            emit_text(&cli.out, &report.transcript())?;
            Ok(EXIT_OK)
        }
        Command::Sweep { grid, format, evidence_dir } => {
            let grid = inputs::parse_grid(grid)?;
            let result = delta_sweep(&grid).map_err(|e| anyhow!("sweep failed: {e}"))?;
            let body = match format.as_str() {
                "csv" => result.to_csv(),
                _ => {
                    #[derive(Serialize)]
                    struct Row<'a> {
                        delta: f64,
                        contextual: bool,
                        evidence: &'a str,
                    }
                    let rows: Vec<Row> = result
                        .rows
                        .iter()
                        .map(|r| Row {
                            delta: r.delta,
                            contextual: r.contextual,
                            evidence: &r.evidence,
                        })
                        .collect();
                    serde_json::to_string_pretty(&rows)? + "\n"
                }
            };
            emit_text(&cli.out, &body)?;
            let dir = evidence_dir.clone().or_else(|| {
                cli.out
                    .as_ref()
                    .map(|p| p.parent().unwrap_or(Path::new(".")).to_path_buf())
            });
            if let Some(dir) = dir {
                std::fs::create_dir_all(&dir)
                    .with_context(|| format!("cannot create evidence dir {}", dir.display()))?;
                for (id, text) in &result.transcripts {
                    std::fs::write(dir.join(format!("{id}.txt")), text)
                        .with_context(|| format!("cannot write transcript {id}"))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Gleason { rho, map, space, starts, seed } => {
            let rho = inputs::load_density(rho)?;
            let map = inputs::parse_map_spec(map)?;
            let space = match space {
                Some(path) => inputs::load_space(path)?,
                None => {
                    if rho.dim() != 3 {
                        return Err(anyhow!(
                            "the bundled probe space is three-dimensional; pass --space for d = {}",
                            rho.dim()
                        ));
                    }
                    qivpm_core::events::spread_probe_space().map_err(|e| anyhow!("{e}"))?
                }
            };
            match gleason_bound_check(&rho, &map, &space, *starts, *seed) {
                Ok(report) => {
                    let holds = report.holds;
                    emit_json(&cli.out, &report)?;
                    Ok(if holds { EXIT_OK } else { EXIT_INVALID })
                }
                Err(e @ qivpm_core::Error::MeasureInvalid { .. }) => {
                    eprintln!("error: {e}");
                    Ok(EXIT_INVALID)
                }
                Err(e) => Err(anyhow!("distance bound check failed: {e}")),
            }
        }
        Command::Ultra { map, step, tol } => {
            let map = inputs::parse_map_spec(map)?;
            let report = ultramodular_check(&map, *step, *tol)
                .map_err(|e| anyhow!("map check failed: {e}"))?;
            let ok = report.valid;
            emit_json(&cli.out, &report)?;
            Ok(if ok { EXIT_OK } else { EXIT_INVALID })
        }
    }
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit_text(out, &text)
}

fn emit_text(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
