use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use cavity_cli::commands::{self, resolve_sweep};
use cavity_cli::config::{AsymptoticsConfig, SweepParameter};
use cavity_cli::output::OutDir;
use cavity_cli::RunConfig;
use clap::{Parser, Subcommand};

/// Overrides `[output] directory` (but not `--out`).
const OUT_DIR_ENV: &str = "SOLVER_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "solver", version, about = "Transverse modes of a coupled strip-resonator cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Unitarity, sampling, stability and cross-operator consistency checks
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalues to spectrum.csv, run metadata to meta.json
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Eigenmode profiles to mode_k.csv
    Modes {
        #[command(flatten)]
        common: Common,
        /// Mode indices (default: the first `solve.modes`, or 1)
        #[arg(long, value_delimiter = ',')]
        index: Option<Vec<usize>>,
    },
    /// Top eigenvalues across a parameter range to sweep.csv
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        parameter: Option<SweepParameter>,
        #[arg(long, requires = "to", allow_negative_numbers = true)]
        from: Option<f64>,
        #[arg(long, requires = "from", allow_negative_numbers = true)]
        to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Partial integrals against leading-order stationary phase to asymptotics.csv
    Asymptotics {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Validate { common }
            | Command::Spectrum { common }
            | Command::Modes { common, .. }
            | Command::Sweep { common, .. }
            | Command::Asymptotics { common, .. } => common,
        }
    }
}

fn out_dir(common: &Common, config: &RunConfig) -> anyhow::Result<OutDir> {
    let root = common
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(&config.output.directory));
    OutDir::create(&root)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let common = cli.command.common();
    let config = RunConfig::load(&common.config)?;
    let written = match &cli.command {
        Command::Validate { .. } => {
            let report = commands::cmd_validate(&config)?;
            println!("{report}");
            return Ok(report.passed());
        }
        Command::Spectrum { .. } => commands::cmd_spectrum(&config, &out_dir(common, &config)?)?,
        Command::Modes { index, .. } => {
            commands::cmd_modes(&config, &out_dir(common, &config)?, index.as_deref())?
        }
        Command::Sweep {
            parameter,
            from,
            to,
            steps,
            ..
        } => {
            let range = from.zip(*to);
            let sweep = resolve_sweep(&config, *parameter, range, *steps)?;
            commands::cmd_sweep(&config, &out_dir(common, &config)?, &sweep)?
        }
        Command::Asymptotics { y, t, .. } => {
            let mut spec = config.asymptotics.clone().unwrap_or(AsymptoticsConfig {
                y: vec![0.0],
                t: vec![50.0, 200.0, 800.0],
                magnification: None,
                center: 0.0,
                width: 1.0,
            });
            if let Some(y) = y {
                spec.y = y.clone();
            }
            if let Some(t) = t {
                spec.t = t.clone();
            }
            commands::cmd_asymptotics(&config, &out_dir(common, &config)?, &spec)
                .context("asymptotics")?
        }
    };
    for path in written {
        println!("{}", path.display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
