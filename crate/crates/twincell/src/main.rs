use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use twincell::cell::SimMode;
use twincell::commands::{self, CommandError};

/// Assembly planning and cell simulation from CAEX product descriptions.
#[derive(Parser)]
#[command(name = "twincell", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a product description against the structural rules
    Validate {
        /// CAEX .aml/.xml product description
        file: PathBuf,
    },
    /// Export the parameter/create/connection item stream to a text file
    ExportItems {
        file: PathBuf,
        /// Output .items path
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Resolve target poses, order the assembly and plan trajectories
    Plan {
        file: PathBuf,
        /// Cell geometry manifest (TOML)
        #[arg(long)]
        geometry: PathBuf,
        /// Output plan path (JSON)
        #[arg(short, long)]
        output: PathBuf,
        /// Numeric override, e.g. sweep_step=0.01 (repeatable)
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run the cell simulation and write the event trace
    Simulate {
        file: PathBuf,
        /// Cell geometry manifest (TOML)
        #[arg(long)]
        geometry: PathBuf,
        /// virtual, physical or both
        #[arg(long)]
        mode: SimMode,
        /// Output trace path (JSON lines)
        #[arg(long)]
        trace: PathBuf,
        /// Directory for scene snapshots
        #[arg(long)]
        snapshots: Option<PathBuf>,
        /// Also snapshot every N ticks (with --snapshots)
        #[arg(long, value_name = "N")]
        every: Option<u64>,
        /// Numeric override, e.g. linear_speed=0.25 (repeatable)
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CommandError> {
    match cli.command {
        Command::Validate { file } => {
            let (diagnostics, has_errors) = commands::run_validate(&file)?;
            for diagnostic in &diagnostics {
                println!("{diagnostic}");
            }
            if has_errors {
                Ok(ExitCode::from(1))
            } else {
                println!("{}: ok ({} warnings)", file.display(),
                    diagnostics.len());
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::ExportItems { file, output } => {
            commands::run_export_items(&file, &output)?;
            println!("wrote {}", output.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Plan { file, geometry, output, set } => {
            let plan = commands::run_plan(&file, &geometry, &output, &set)?;
            println!("planned {} parts: {}", plan.sequence.len(), plan.sequence.join(" "));
            println!("wrote {}", output.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { file, geometry, mode, trace, snapshots, every, set } => {
            let outcome =
                commands::run_simulate(&file, &geometry, mode, &trace, snapshots.as_deref(), every, &set)?;
            println!(
                "simulated mode {}: {} events, {} connects",
                mode,
                outcome.trace.events().len(),
                outcome.trace.connect_order().len()
            );
            println!("wrote {}", trace.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
