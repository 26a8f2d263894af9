//! Batch front-end: `birkhoff <command> --config <path> [--seed N] [--out DIR] [--jobs N]`.

mod commands;
pub mod config;

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{parse_config, ExperimentConfig, HamiltonianSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "birkhoff",
    version,
    about = "Birkhoff normal forms and stability experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Normalize `[hamiltonian]` to order `bnf.m`.
    Bnf(RunArgs),
    /// Diophantine constant of a frequency vector.
    Dioph(RunArgs),
    /// Draw one Hilbert-brick sample.
    Sample(RunArgs),
    /// Triangularity and Jacobian reports for the invariant map.
    Bnfmap(RunArgs),
    /// Rescaled normal form and its brick norms.
    Rescale(RunArgs),
    /// Bad-parameter volume sweep over eps.
    Badvol(RunArgs),
    /// One trajectory with its actions and energy.
    Drift(RunArgs),
    /// Exit times over a radius grid plus model fits.
    Scaling(RunArgs),
}

#[derive(clap::Args, Debug, Clone, PartialEq, Eq)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `seed` from the config.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads; overrides `jobs` from the config.
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bnf(_) => "bnf",
            Command::Dioph(_) => "dioph",
            Command::Sample(_) => "sample",
            Command::Bnfmap(_) => "bnfmap",
            Command::Rescale(_) => "rescale",
            Command::Badvol(_) => "badvol",
            Command::Drift(_) => "drift",
            Command::Scaling(_) => "scaling",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Bnf(a)
            | Command::Dioph(a)
            | Command::Sample(a)
            | Command::Bnfmap(a)
            | Command::Rescale(a)
            | Command::Badvol(a)
            | Command::Drift(a)
            | Command::Scaling(a) => a,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Compute(crate::Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Parse { .. } => CliError::Config(e.to_string()),
            e => CliError::Compute(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Compute(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_OTHER,
        }
    }
}

/// Run one command; returns the paths written.
pub fn run(command: &Command) -> Result<Vec<PathBuf>, CliError> {
    let args = command.args();
    let text = std::fs::read_to_string(args.config.as_path()).map_err(|e| {
        CliError::Config(format!(
            "cannot read {}: {e}",
            args.config.as_path().display()
        ))
    })?;
    let mut cfg = parse_config(&text).map_err(CliError::Config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(file) = cfg.perturbation.as_mut().and_then(|p| p.file.as_mut()) {
        if file.is_relative() {
            if let Some(dir) = args.config.parent() {
                *file = dir.join(&*file);
            }
        }
    }
    if let Some(j) = args.jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs: must be at least 1".into()));
        }
        cfg.jobs = Some(j);
    }
    std::fs::create_dir_all(args.out.as_path())?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    pool.install(|| commands::dispatch(command.name(), &cfg, args.out.as_path()))
}

/// Entry point for the binary: parse `argv`, run, report, exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&cli.command) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("birkhoff {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
