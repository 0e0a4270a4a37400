//! `gwcoupler`: mode tables, couplings, amplitude traces, switching curves
//! and design sweeps for a two-channel graphene waveguide coupler.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Settings;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Model(gwcoupler::Error),
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(e) if e.is_physics() => 3,
            CliError::Model(_) => 2,
            CliError::Output(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) | CliError::Output(msg) => f.write_str(msg),
            CliError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl From<gwcoupler::Error> for CliError {
    fn from(e: gwcoupler::Error) -> Self {
        CliError::Model(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "gwcoupler", version, about)]
struct Cli {
    /// Flat TOML file with any of the keys below
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps [default: all cores]
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(flatten)]
    settings: Settings,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Guided modes of both wells
    Modes {
        /// Also write mode profiles u(x) on a uniform grid to this CSV
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Coupling coefficients of the selected mode pair
    Couple {
        /// Tabulate every source/drain mode pair
        #[arg(long)]
        all_pairs: bool,
    },
    /// Amplitude trace along the coupler, starting in the source
    Propagate,
    /// Reachable transfer versus drain gate offset
    Switching,
    /// Transfer frequency over a (d, D) grid
    Sweep,
    /// Exponential law f_T = 2 v_F Ω0 exp(-γD)/π
    Fit {
        /// Fit an existing single-d sweep CSV instead of running one
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = match &cli.config {
        Some(path) => Settings::from_file(path)?.overlaid_by(cli.settings),
        None => cli.settings,
    };
    let output = match cli.command {
        Command::Modes { profile } => {
            let (table, profiles) = commands::modes(&settings, profile.is_some())?;
            if let (Some(path), Some(body)) = (profile, profiles) {
                write_output(Some(&path), &body)?;
            }
            table
        }
        Command::Couple { all_pairs } => commands::couple(&settings, all_pairs)?,
        Command::Propagate => commands::propagate(&settings)?,
        Command::Switching => commands::switching(&settings)?,
        Command::Sweep => commands::sweep(&settings, cli.threads)?,
        Command::Fit { input } => commands::fit(&settings, input.as_deref(), cli.threads)?,
    };
    write_output(cli.out.as_deref(), &output)
}

fn write_output(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, body)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| CliError::Output(format!("stdout: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gwcoupler: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
