use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use livens::commands::{check_command, convergence_study_command, run_simulation_command};
use livens::config::{parse_config, RunConfig};
use livens::Error;

#[derive(Parser)]
#[command(
    name = "livens",
    version,
    about = "Energy-consistent integration of mechanical systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configured run and write trajectory.csv and diagnostics.csv.
    Simulate {
        config: PathBuf,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Step size (overrides `solver.h`).
        #[arg(long)]
        h: Option<f64>,
        /// Final time (overrides `solver.T`).
        #[arg(long = "T")]
        t_end: Option<f64>,
    },
    /// Observed order of accuracy over a list of step sizes.
    Converge {
        config: PathBuf,
        /// Comma-separated step sizes in descending order.
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a configuration and the consistency of its initial state.
    Check { config: PathBuf },
}

fn load(path: &Path) -> anyhow::Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate { config, out, h, t_end } => {
            let mut config = load(&config)?;
            if let Some(out) = out {
                config.output_dir = out;
            }
            if let Some(h) = h {
                config.settings.h = h;
            }
            if let Some(t_end) = t_end {
                config.settings.t_end = t_end;
            }
            let summary = run_simulation_command(&config)?;
            println!("{summary}");
        }
        Command::Converge { config, h, out } => {
            let mut config = load(&config)?;
            if let Some(out) = out {
                config.output_dir = out;
            }
            let report = convergence_study_command(&config, &h)?;
            println!("{:>12}  {:>14}  {:>8}", "h", "error(q)", "order");
            for row in &report.rows {
                let order = row.observed_order.map(|p| format!("{p:.4}")).unwrap_or_default();
                println!("{:>12e}  {:>14.6e}  {:>8}", row.h, row.global_error_q, order);
            }
            if let Some(h_ref) = report.reference_h {
                println!("reference step: {h_ref:e}");
            }
            println!("wrote {}", config.output_dir.join("convergence.csv").display());
        }
        Command::Check { config } => {
            let path = config;
            let config = load(&path)?;
            check_command(&config)?;
            println!(
                "{}: ok ({} model, {} steps)",
                path.display(),
                config.model,
                config.settings.num_steps()
            );
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::Parse { .. } | Error::Validation(_) | Error::InvalidParameter(_) | Error::DimensionMismatch { .. },
        ) => 2,
        Some(Error::InconsistentInitialState(_)) => 3,
        Some(
            Error::NoConvergence { .. }
            | Error::SingularMatrix { .. }
            | Error::SingularMass { .. }
            | Error::NonFiniteValue(_),
        ) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
