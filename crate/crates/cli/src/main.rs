mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conformal_h2::conformal::MapSpec;
use conformal_h2::hardy::Framework;
use conformal_h2::models::ModelParams;

use crate::config::{InputKind, RunConfig};

/// Exit codes shared by every subcommand.
pub mod exit {
    pub const OK: u8 = 0;
    pub const CONFIG: u8 = 1;
    pub const NOT_CONVERGED: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const CHECK_FAILED: u8 = 4;
    pub const UNSUPPORTED: u8 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(conformal_h2::Error),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<conformal_h2::Error> for CliError {
    fn from(e: conformal_h2::Error) -> Self {
        use conformal_h2::Error as E;
        match e {
            E::Config(msg) => CliError::Config(msg),
            E::Parse { .. } => CliError::Config(e.to_string()),
            E::Io(io) => CliError::Io(io),
            E::Unsupported(msg) => CliError::Unsupported(msg),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => exit::CONFIG,
            CliError::Numerical(_) => exit::NUMERICAL,
            CliError::Unsupported(_) => exit::UNSUPPORTED,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "conformal-h2", version, about = "H2-optimal rational approximation on conformally mapped domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the fixed-point iteration for every (r, seed) pair.
    Approximate(Common),
    /// Check the optimality conditions of a stored ROM.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rom: PathBuf,
        /// Largest admissible interpolation residual.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Simulate the full and reduced delay systems and check the output bound.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rom: PathBuf,
        #[arg(long, value_enum)]
        input: Option<InputArg>,
        /// Impulse position.
        #[arg(long)]
        m: Option<usize>,
        /// Number of time steps.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        input_seed: Option<u64>,
    },
    /// Tabulate the iteration against a greedy barycentric fit per degree.
    CompareAaa(Common),
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum InputArg {
    Impulse,
    Random,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    framework: Option<String>,
    /// Orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<usize>>,
    /// Seeds `0..N` are used.
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(name) = &self.model {
            if cfg.model.as_ref().is_none_or(|m| &m.name != name) {
                cfg.model = Some(ModelParams::named(name.clone()));
            }
        }
        if let Some(kind) = &self.map {
            if cfg.map.as_ref().is_none_or(|m| &m.kind != kind) {
                cfg.map = Some(MapSpec::new(kind.clone()));
            }
        }
        if let Some(h) = self.h {
            cfg.map.as_mut().ok_or_else(|| CliError::Config("--h given without a map".into()))?.h = Some(h);
        }
        if let Some(fw) = &self.framework {
            cfg.run.framework = fw.parse::<Framework>().map_err(|e| CliError::Config(e.to_string()))?;
        }
        if let Some(r) = &self.r {
            cfg.run.r = r.clone();
        }
        if let Some(s) = self.seeds {
            cfg.run.seeds = s;
        }
        if let Some(t) = self.tol {
            cfg.run.tol = t;
        }
        if let Some(m) = self.max_iter {
            cfg.run.max_iter = m;
        }
        if let Some(o) = &self.out {
            cfg.run.out = Some(o.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("CONFORMAL_H2_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("CONFORMAL_H2_THREADS must be a positive integer, got `{v}`")))?;
    if n == 0 {
        return Err(CliError::Config("CONFORMAL_H2_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    init_threads()?;
    match cli.command {
        Command::Approximate(c) => commands::approximate(&c.resolve()?),
        Command::Verify { common, rom, threshold } => {
            let mut cfg = common.resolve()?;
            if let Some(t) = threshold {
                cfg.run.threshold = t;
            }
            cfg.validate()?;
            commands::verify(&rom, &cfg)
        }
        Command::Simulate { common, rom, input, m, k, input_seed } => {
            let mut cfg = common.resolve()?;
            if let Some(i) = input {
                cfg.simulate.input = match i {
                    InputArg::Impulse => InputKind::Impulse,
                    InputArg::Random => InputKind::Random,
                };
            }
            if let Some(m) = m {
                cfg.simulate.m = m;
            }
            if let Some(k) = k {
                cfg.simulate.k = k;
            }
            if let Some(s) = input_seed {
                cfg.simulate.input_seed = s;
            }
            cfg.validate()?;
            commands::simulate(&rom, &cfg)
        }
        Command::CompareAaa(c) => commands::compare_aaa(&c.resolve()?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::CONFIG } else { exit::OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
