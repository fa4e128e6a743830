use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

mod analyze;
mod config;
mod disagree;
mod enumerate;
mod output;
mod sample;
mod transfer;
mod verify;

use config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Check(_) => 2,
        }
    }
}

/// Experiments on the interacting monomer-dimer model: exact checks,
/// transfer-matrix tables, Metropolis sampling and order-parameter analysis.
#[derive(Debug, Parser)]
#[command(name = "dimerlab", version, after_long_help = config::REFERENCE)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML configuration file (see --help for every key)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: output.dir, then $DIMERLAB_OUT, then ./dimerlab-out]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for independent chains and pairs; results do not depend on it
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Override sampler.seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override model.beta
    #[arg(long)]
    beta: Option<f64>,
    /// Override sampler.sweeps
    #[arg(long)]
    sweeps: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Enumeration and transfer-matrix cross-checks
    Oracle,
    /// Configuration-graph, stick and grid invariants over small windows
    Invariants,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run built-in consistency checks; exit 2 on any failure
    Verify {
        #[arg(long, value_enum, default_value = "oracle")]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate the one-dimensional spectrum and segment partition functions
    Transfer {
        #[command(flatten)]
        common: Common,
    },
    /// Exact Gibbs averages and edge marginals on a small window
    Enumerate {
        #[command(flatten)]
        common: Common,
    },
    /// Run Metropolis chains on a torus
    Sample {
        #[command(flatten)]
        common: Common,
    },
    /// Sticks, grids and escape probabilities of saved or freshly sampled configurations
    Analyze {
        /// Configuration files to analyse instead of sampling inline
        #[arg(long)]
        input: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Disagreement sets, sealing events and connection decay of sample pairs
    Disagree {
        /// Two configuration files forming one pair; repeatable
        #[arg(long, num_args = 2, value_names = ["SIGMA", "SIGMA_PRIME"], action = ArgAction::Append)]
        pair: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

/// Configuration with command-line overrides applied, and the output
/// directory.
pub struct Context {
    pub cfg: ExperimentConfig,
    pub out: PathBuf,
    pub threads: usize,
}

impl Context {
    fn new(common: &Common) -> Result<Self, CliError> {
        let mut cfg = match &common.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = common.seed {
            cfg.sampler.seed = s;
        }
        if let Some(b) = common.beta {
            cfg.model.beta = b;
        }
        if let Some(s) = common.sweeps {
            cfg.sampler.sweeps = s;
        }
        if common.threads == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        let out = output::resolve_dir(common.out.as_deref(), &cfg);
        Ok(Context { cfg, out, threads: common.threads })
    }

    /// Run `f` on a pool of the requested size.
    pub fn pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.threads).build().map_err(CliError::config)?;
        Ok(pool.install(f))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Verify { suite, common } => verify::run(&Context::new(&common)?, suite),
        Command::Transfer { common } => transfer::run(&Context::new(&common)?),
        Command::Enumerate { common } => enumerate::run(&Context::new(&common)?),
        Command::Sample { common } => sample::run(&Context::new(&common)?),
        Command::Analyze { input, common } => analyze::run(&Context::new(&common)?, &input),
        Command::Disagree { pair, common } => disagree::run(&Context::new(&common)?, &pair),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dimerlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_checks_exit_two() {
        assert_eq!(CliError::Check("x".into()).exit_code(), 2);
        assert_eq!(CliError::Config("x".into()).exit_code(), 1);
        assert_eq!(CliError::io(Path::new("f"), std::io::Error::other("x")).exit_code(), 1);
    }

    #[test]
    fn pair_takes_two_paths_per_use() {
        let cli = Cli::try_parse_from(["dimerlab", "disagree", "--pair", "a", "b", "--pair", "c", "d"]).unwrap();
        let Command::Disagree { pair, .. } = cli.command else { panic!("wrong command") };
        assert_eq!(pair.len(), 4);
        assert!(Cli::try_parse_from(["dimerlab", "disagree", "--pair", "a"]).is_err());
    }
}
