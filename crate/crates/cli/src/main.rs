use std::path::PathBuf;
use std::process::ExitCode;

use beamsquint::config::{Config, ConfigError};
use beamsquint::experiment::{run_pattern, run_simulation, run_sweep_offset};
use beamsquint::Error;
use clap::{Args, Parser, Subcommand};
use log::info;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "beamsquint", version, about = "Beam squint analysis and NCR system-level simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration file; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gain-versus-angle traces of codebook beams.
    Pattern(Common),
    /// Gain at the design direction versus frequency offset.
    SweepOffset(Common),
    /// System-level drop matrix.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        drops: Option<u32>,
    },
    /// Parse and validate a configuration file.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(c) => Failure::Config(c.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn load(path: &Option<PathBuf>) -> Result<Config, Failure> {
    match path {
        Some(p) => Ok(Config::load(p)?),
        None => Ok(Config::default()),
    }
}

fn set_threads(n: Option<usize>) -> Result<(), Failure> {
    if let Some(n) = n {
        if n == 0 {
            return Err(Failure::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Pattern(c) => {
            let cfg = load(&c.config)?;
            set_threads(c.threads)?;
            let files = run_pattern(&cfg.pattern, &c.out)?;
            info!("wrote {} files to {}", files.len(), c.out.display());
        }
        Command::SweepOffset(c) => {
            let cfg = load(&c.config)?;
            set_threads(c.threads)?;
            let files = run_sweep_offset(&cfg.sweep_offset, &c.out)?;
            info!("wrote {} files to {}", files.len(), c.out.display());
        }
        Command::Simulate { common, seed, drops } => {
            let mut cfg = load(&common.config)?;
            if let Some(s) = seed {
                cfg.simulation.seed = s;
            }
            if let Some(d) = drops {
                cfg.simulation.drops = d;
            }
            cfg.validate()?;
            set_threads(common.threads)?;
            let out = run_simulation(&cfg.simulation, &common.out)?;
            info!(
                "{} summary rows, {} files in {}",
                out.summary.len(),
                out.files.len(),
                common.out.display()
            );
        }
        Command::ValidateConfig { config } => {
            let cfg = Config::load(&config)?;
            println!(
                "{}: ok (schema {}, {} simulation runs)",
                config.display(),
                cfg.schema_version,
                cfg.simulation.array_sizes.len()
                    * cfg.simulation.delta_f_hz.len()
                    * cfg.simulation.modes.len()
                    * cfg.simulation.drops as usize
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
