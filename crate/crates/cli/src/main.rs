//! `edgroup`: nearest points and critical-point counts on matrix groups.

mod commands;
mod error;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::Settings;
use error::CliError;
use report::RunReport;

#[derive(Debug, Parser)]
#[command(name = "edgroup", version, about = "Nearest points on real matrix groups")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Residual tolerance, scaled by 1 + ||u||.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,
    /// Multistart census size.
    #[arg(long, global = true, default_value_t = 1000)]
    starts: usize,
    /// Record wall time in the report (output is then not reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Nearest element of the group to the matrix in INPUT.
    Nearest {
        /// orthogonal, special-orthogonal, unitary, sl or sl-pm.
        group: String,
        input: PathBuf,
        /// pm or plus; sl groups only.
        #[arg(long)]
        component: Option<String>,
    },
    /// All real critical points of the squared distance.
    Critical { group: String, input: PathBuf },
    /// Reproduce the critical-point counts for a suite.
    Verify {
        /// orthogonal, special-orthogonal, unitary, sl, torus, symplectic or all.
        suite: String,
    },
    /// Normalized-volume bound for a torus weight set.
    Bkk { weightset: PathBuf },
}

fn run(cli: &Cli) -> Result<RunReport, CliError> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Input(format!("--tol must be positive, got {}", cli.tol)));
    }
    if cli.starts == 0 {
        return Err(CliError::Input("--starts must be positive".into()));
    }
    let settings = Settings {
        seed: cli.seed,
        tol: cli.tol,
        starts: cli.starts,
    };
    match &cli.command {
        Command::Nearest {
            group,
            input,
            component,
        } => commands::nearest(group, input, component.as_deref(), &settings),
        Command::Critical { group, input } => commands::critical(group, input, &settings),
        Command::Verify { suite } => verify::run(suite, &settings),
        Command::Bkk { weightset } => commands::bkk(weightset, &settings),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            if cli.timing {
                report.elapsed_ms = start.elapsed().as_millis() as u64;
            }
            println!("{}", report.to_json());
            if matches!(cli.command, Command::Verify { .. }) {
                eprint!("{}", verify::table(&report));
                if !report.all_pass() {
                    for c in report.counts.iter().filter(|c| c.pass == Some(false)) {
                        eprintln!(
                            "failed: {} (expected {:?}, observed {:?})",
                            c.label, c.expected, c.observed
                        );
                    }
                    return ExitCode::from(1);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("edgroup: {e}");
            e.exit_code()
        }
    }
}
