//! Experiment driver for the damped-oscillator Fock-lattice library.
//!
//! Five subcommands emit machine-readable data files (CSV or JSON), each
//! accompanied by a manifest recording the exact effective parameters and a
//! checksum of the data payload:
//!
//! * `spectra`       eigenvalues of one chain under obc/pbc/tbc
//! * `winding-map`   winding number and ln|R| on a reference-energy grid
//! * `evolve`        time evolution observables on the truncated chain
//! * `scaling`       loop radius and spectral markers versus truncation
//! * `annihilate`    the annihilation-operator experiment
//!
//! Exit codes: 0 success, 2 argument errors, 3 numerical failures.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Config;

/// Errors mapped onto process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Invalid flags or config: exit 2.
    Usage(String),
    /// Numerical failure in the library: exit 3.
    Numerical(String),
    /// I/O or serialization trouble: exit 1.
    Io(String),
}

impl From<fockskin::Error> for CliError {
    fn from(e: fockskin::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "fockskin", version, about = "Damped-oscillator Fock-lattice experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of one chain under open/periodic/twisted boundaries
    Spectra(commands::spectra::Args),
    /// Winding number map over a grid of reference energies
    WindingMap(commands::winding_map::Args),
    /// Time evolution of an initial state on the open chain
    Evolve(commands::evolve::Args),
    /// Spectral markers and loop radius over a list of truncations
    Scaling(commands::scaling::Args),
    /// Annihilation-operator spectra, winding and coherent modes
    Annihilate(commands::annihilate::Args),
}

/// Flags shared by every subcommand.
#[derive(clap::Args)]
pub struct CommonArgs {
    /// Flat key=value file overriding defaults (flags override the config)
    #[arg(long, global = false)]
    config: Option<PathBuf>,
    /// Output file; data goes to stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<output::Format>,
}

impl CommonArgs {
    fn format(&self, cfg: &Config) -> Result<output::Format, CliError> {
        match self.format {
            Some(f) => Ok(f),
            None => match cfg.get::<String>("format")? {
                Some(s) if s.eq_ignore_ascii_case("json") => Ok(output::Format::Json),
                Some(s) if s.eq_ignore_ascii_case("csv") => Ok(output::Format::Csv),
                Some(s) => Err(CliError::Usage(format!("unknown format {s:?} in config"))),
                None => Ok(output::Format::Csv),
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectra(args) => commands::spectra::run(args),
        Command::WindingMap(args) => commands::winding_map::run(args),
        Command::Evolve(args) => commands::evolve::run(args),
        Command::Scaling(args) => commands::scaling::run(args),
        Command::Annihilate(args) => commands::annihilate::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let label = match &err {
                CliError::Usage(m) => format!("argument error: {m}"),
                CliError::Numerical(m) => format!("numerical failure: {m}"),
                CliError::Io(m) => format!("io error: {m}"),
            };
            eprintln!("fockskin: {label}");
            ExitCode::from(err.exit_code())
        }
    }
}
