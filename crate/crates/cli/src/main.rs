use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eit_fbp::{filter_table, parse_config, run_pipeline, RunOptions};

const CONFIG_ERROR: u8 = 2;
const RUNTIME_ERROR: u8 = 3;

/// Simulate impedance tomography phantoms and reconstruct them by filtered
/// back projection.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full pipeline for a config file
    Run {
        config: PathBuf,
        /// Output directory, overriding `output_dir` in the config
        #[arg(long)]
        out: Option<PathBuf>,
        /// Reconstruction grid size, overriding every entry in the config
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        quiet: bool,
    },
    /// Parse and validate a config file without running it
    Validate { config: PathBuf },
    /// Print the filter gain table as CSV
    Filters {
        #[arg(long, default_value_t = 11, value_parser = clap::value_parser!(u64).range(2..))]
        points: u64,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            config,
            out,
            grid,
            quiet,
        } => {
            let mut cfg = match parse_config(&config) {
                Ok(c) => c,
                Err(e) => return fail(CONFIG_ERROR, e),
            };
            if let Some(dir) = out {
                cfg.output_dir = dir;
            }
            if let Some(n) = grid {
                cfg = match cfg.with_grid(n) {
                    Ok(c) => c,
                    Err(e) => return fail(CONFIG_ERROR, e),
                };
            }
            match run_pipeline(&cfg, RunOptions { quiet }) {
                Ok(_) => ExitCode::SUCCESS,
                Err(e) => fail(RUNTIME_ERROR, e),
            }
        }
        Command::Validate { config } => match parse_config(&config) {
            Ok(cfg) => {
                println!("{}: ok ({cfg})", config.display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(CONFIG_ERROR, e),
        },
        Command::Filters { points } => {
            print!("{}", filter_table(points as usize));
            ExitCode::SUCCESS
        }
    }
}

fn fail(code: u8, e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(code)
}
