use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biasflow_cli::commands::{self, DEFAULT_TOL};
use biasflow_cli::scenario::EngineSpec;
use biasflow_cli::{CliError, Prepared, Scenario};
use biasflow_core::Tolerances;
use clap::{error::ErrorKind, Parser, Subcommand};
use serde::Serialize;

/// Biased opinion dynamics on weighted digraphs.
///
/// Errors are printed to stderr as a single JSON object. Exit codes: 0 ok,
/// 1 output could not be written, 2 invalid input, 3 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "biasflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Connectivity, spectrum, stability verdict and steady state or drift.
    Analyze {
        scenario: PathBuf,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the scenario, writing the trajectory as CSV.
    Simulate {
        scenario: PathBuf,
        /// Trajectory CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Summary JSON path; stdout when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Cluster tolerance applied to the final state.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Overrides `sim.engine`.
        #[arg(long, value_enum)]
        engine: Option<EngineSpec>,
    },
    /// Synthesize a control schedule towards a target and verify it by simulation.
    Design {
        scenario: PathBuf,
        /// Target opinions, comma separated. Defaults to the scenario's `control.x_d`.
        #[arg(long = "x-d", value_delimiter = ',', allow_hyphen_values = true)]
        x_d: Option<Vec<f64>>,
        /// Length of the transport stage; defaults to `control.t_bar`, then 1.
        #[arg(long = "t-bar")]
        t_bar: Option<f64>,
        /// Schedule JSON path. The full report goes to stdout either way.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum)]
        engine: Option<EngineSpec>,
    },
    /// Write a random scenario for testing.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Probability of each directed edge.
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("reports serialize");
    bytes.push(b'\n');
    bytes
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::write(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::write(Path::new("<stdout>"), e))
        }
    }
}

fn load(path: &Path) -> Result<Prepared, CliError> {
    Scenario::load(path)?.prepare(&Tolerances::default())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { scenario, out } => {
            let report = commands::analyze(&load(&scenario)?)?;
            emit(out.as_deref(), &to_json(&report))
        }
        Command::Simulate {
            scenario,
            out,
            summary,
            tol,
            engine,
        } => {
            let p = load(&scenario)?;
            let (traj, report) = commands::simulate_scenario(&p, tol, engine)?;
            let file = fs::File::create(&out).map_err(|e| CliError::write(&out, e))?;
            commands::write_csv(&traj, std::io::BufWriter::new(file)).map_err(|e| CliError::write(&out, e))?;
            if let Some(w) = &report.warning {
                eprintln!("{}", serde_json::json!({ "warning": w }));
            }
            emit(summary.as_deref(), &to_json(&report))
        }
        Command::Design {
            scenario,
            x_d,
            t_bar,
            out,
            tol,
            engine,
        } => {
            let p = load(&scenario)?;
            let (x_d, t_bar) = commands::design_inputs(&p, x_d.as_deref(), t_bar)?;
            let report = commands::design(&p, &x_d, t_bar, tol, engine)?;
            if let Some(path) = &out {
                emit(Some(path), &to_json(&report.schedule))?;
            }
            emit(None, &to_json(&report))
        }
        Command::Gen { seed, n, p, out } => {
            let s = commands::generate(seed, n, p)?;
            let mut bytes = s.to_json_pretty().into_bytes();
            bytes.push(b'\n');
            emit(out.as_deref(), &bytes)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.render().to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code())
        }
    }
}
