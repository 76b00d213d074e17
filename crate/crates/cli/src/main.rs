//! `hybridosc`: run, sweep, reconstruct and tabulate spin-oscillator experiments.

mod commands;
mod config;
mod error;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::OutFile;
use crate::config::{ExperimentConfig, RawConfig};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "hybridosc",
    version,
    about = "Spin-oscillator squeezed-superposition simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Execute one circuit and report herald statistics and Fock populations.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Repeat a circuit over a list of parameter values.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to sweep: zeta_abs, duration, gamma, phi or c.
        #[arg(long)]
        param: Option<String>,
        /// `start:stop:count` or a comma-separated list.
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
    },
    /// Reconstruct the Wigner function from the characteristic function.
    Wigner {
        #[command(flatten)]
        common: Common,
        /// Use the exact characteristic function even if the config sets shots.
        #[arg(long, conflicts_with = "shots")]
        exact: bool,
        /// Half-width of the beta grid.
        #[arg(long)]
        beta_max: Option<f64>,
        /// Points per beta axis (odd).
        #[arg(long)]
        points: Option<usize>,
    },
    /// Compute a summary table.
    Table {
        /// Table name.
        #[arg(default_value = "wln")]
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Common {
    /// Built-in parameter set.
    #[arg(long)]
    preset: Option<String>,
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Enable heating and thermal initial occupation.
    #[arg(long)]
    noise: bool,
    /// Shots per herald or per characteristic-function point.
    #[arg(long)]
    shots: Option<u64>,
    /// Seed of the shot sampler.
    #[arg(long)]
    seed: Option<u64>,
    /// Fock truncation.
    #[arg(long)]
    nmax: Option<usize>,
    /// Output directory; without it the primary output goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

/// Flag overrides as a config layer.
fn flag_layer(common: &Common) -> RawConfig {
    let mut raw = RawConfig::default();
    if common.noise {
        raw.set("noise", "on");
    }
    if let Some(v) = common.shots {
        raw.set("shots", v.to_string());
    }
    if let Some(v) = common.seed {
        raw.set("seed", v.to_string());
    }
    if let Some(v) = common.nmax {
        raw.set("nmax", v.to_string());
    }
    if let Some(v) = &common.out {
        raw.set("out", v.display().to_string());
    }
    if let Some(v) = common.format {
        raw.set(
            "format",
            match v {
                FormatArg::Csv => "csv",
                FormatArg::Json => "json",
            },
        );
    }
    raw
}

/// Layers preset < config file < flags.
fn resolve(common: &Common, extra: RawConfig) -> Result<ExperimentConfig, CliError> {
    let file = common.config.as_deref().map(RawConfig::load).transpose()?;
    let preset = common
        .preset
        .as_deref()
        .or_else(|| file.as_ref().and_then(|f| f.get("preset")));
    let mut raw = match preset {
        Some(name) => {
            let mut base = RawConfig::preset(name)?;
            base.set("preset", name);
            base
        }
        None => RawConfig::default(),
    };
    if let Some(f) = file {
        raw = raw.overlay(f);
    }
    if let Some(name) = &common.preset {
        raw.set("preset", name.as_str());
    }
    raw.overlay(flag_layer(common)).overlay(extra).resolve()
}

fn emit(cfg: &ExperimentConfig, files: &[OutFile]) -> Result<(), CliError> {
    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
            for f in files {
                let path = dir.join(&f.name);
                std::fs::write(&path, &f.contents)
                    .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
                println!("{}", path.display());
            }
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(files[0].contents.as_bytes())?;
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let (cfg, files) = match cli.command {
        Command::Run { common } => {
            let cfg = resolve(&common, RawConfig::default())?;
            let files = commands::run(&cfg)?;
            (cfg, files)
        }
        Command::Sweep {
            common,
            param,
            values,
        } => {
            let mut extra = RawConfig::default();
            if let Some(p) = param {
                extra.set("sweep_param", p);
            }
            if let Some(v) = values {
                extra.set("sweep_values", v);
            }
            let cfg = resolve(&common, extra)?;
            let files = commands::sweep(&cfg)?;
            (cfg, files)
        }
        Command::Wigner {
            common,
            exact,
            beta_max,
            points,
        } => {
            let mut extra = RawConfig::default();
            if let Some(b) = beta_max {
                extra.set("beta_max", b.to_string());
            }
            if let Some(p) = points {
                extra.set("points", p.to_string());
            }
            let mut cfg = resolve(&common, extra)?;
            if exact {
                cfg.shots = None;
            }
            let files = commands::wigner(&cfg)?;
            (cfg, files)
        }
        Command::Table { name, common } => {
            let cfg = resolve(&common, RawConfig::default())?;
            let files = commands::table(&cfg, &name)?;
            (cfg, files)
        }
    };
    emit(&cfg, &files)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            eprintln!("{}", CliError::usage(first).to_json());
            return ExitCode::from(2);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
