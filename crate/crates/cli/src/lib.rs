//! Command-line front end for the centrolab experiments.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use centrolab_core::{Error, Result};
use clap::{Parser, ValueEnum};

use crate::commands::{run_command, CommandOutput};
use crate::config::{Command, RunConfig, Settings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::NotConverged(_) | Error::Diagnostic(_) => EXIT_SOLVER,
        Error::Budget { .. } => EXIT_BUDGET,
        Error::InvalidDimension(_)
        | Error::InvalidIndex { .. }
        | Error::Config(_)
        | Error::InvalidInput(_)
        | Error::Singularity(_)
        | Error::Parse(_) => EXIT_CONFIG,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CommandArg {
    Sample,
    Spectrum,
    Clt,
    Moments,
    Oracle,
    Variance,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Sample => Command::Sample,
            CommandArg::Spectrum => Command::Spectrum,
            CommandArg::Clt => Command::Clt,
            CommandArg::Moments => Command::Moments,
            CommandArg::Oracle => Command::Oracle,
            CommandArg::Variance => Command::Variance,
        }
    }
}

/// Random centrosymmetric matrix experiments.
///
/// Settings come from an optional `key = value` file; flags override it.
#[derive(Debug, Parser)]
#[command(name = "centrolab", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: CommandArg,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    /// Polynomial coefficients c0,c1,...,cd (complex literals like 1-2i allowed).
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// gaussian or uniform
    #[arg(long)]
    pub dist: Option<String>,
    #[arg(long)]
    pub radius: Option<String>,
    #[arg(long)]
    pub nodes: Option<String>,
    #[arg(long)]
    pub kmax: Option<String>,
    #[arg(long, env = "CENTROLAB_THREADS")]
    pub threads: Option<String>,
    #[arg(long)]
    pub n_list: Option<String>,
    #[arg(long)]
    pub k_list: Option<String>,
    #[arg(long)]
    pub l_list: Option<String>,
    /// Maximum number of index tuples the oracle may enumerate.
    #[arg(long)]
    pub budget: Option<String>,
    #[arg(long)]
    pub max_sweeps: Option<String>,
    /// CLT at n = 4000 unless n is given.
    #[arg(long)]
    pub full_scale: bool,
}

impl Cli {
    pub fn settings(&self) -> Result<Settings> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let overrides = [
            ("out", &self.out),
            ("seed", &self.seed),
            ("n", &self.n),
            ("trials", &self.trials),
            ("f", &self.f),
            ("dist", &self.dist),
            ("radius", &self.radius),
            ("nodes", &self.nodes),
            ("kmax", &self.kmax),
            ("threads", &self.threads),
            ("n_list", &self.n_list),
            ("k_list", &self.k_list),
            ("l_list", &self.l_list),
            ("budget", &self.budget),
            ("max_sweeps", &self.max_sweeps),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                s.set(key, v.as_str())?;
            }
        }
        Ok(s)
    }

    pub fn run_config(&self) -> Result<RunConfig> {
        RunConfig::from_settings(self.command.into(), &self.settings()?, self.full_scale)
    }
}

/// Runs `cfg` on a dedicated pool when a thread count is configured.
pub fn execute(cfg: &RunConfig) -> Result<CommandOutput> {
    match cfg.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Config(format!("threads: {e}")))?;
            pool.install(|| run_command(cfg))
        }
        None => run_command(cfg),
    }
}
