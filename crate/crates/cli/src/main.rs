use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toml::Table;

use catsim_cli::config::{self, Config};
use catsim_cli::error::{CliError, Result};
use catsim_cli::presets::{self, PRESETS};
use catsim_cli::scenario::Scenario;
use catsim_cli::{run, sweep};

#[derive(Parser)]
#[command(name = "catsim", version, about = "Cat-state formation in a degenerate parametric oscillator")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Source {
    /// TOML scenario file.
    config: Option<PathBuf>,

    /// Start from a built-in preset instead of a file.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,

    /// Override a config key, e.g. `--set reservoir.ns=2`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run {
        #[command(flatten)]
        source: Source,
        /// Artifact directory (default: runs/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace artifacts of an earlier run in the output directory.
        #[arg(long)]
        overwrite: bool,
    },
    /// Run a scenario over the grid in its [sweep] section.
    Sweep {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        overwrite: bool,
    },
    /// List built-in presets, or print one as TOML.
    Presets {
        #[command(subcommand)]
        action: Option<PresetAction>,
    },
    /// Check a config and print the resolved parameters.
    Validate {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    Show { name: String },
}

fn load(source: &Source) -> Result<Config> {
    let mut table = match (&source.config, &source.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
            config::parse_table(&text, &path.display().to_string())?
        }
        (None, Some(name)) => {
            let mut t = Table::new();
            t.insert("preset".into(), toml::Value::String(name.clone()));
            t
        }
        (None, None) => return Err(CliError::config("give a config file or --preset NAME")),
    };
    config::apply_overrides(&mut table, &source.overrides)?;
    config::resolve(table)
}

fn out_dir(out: Option<PathBuf>, scenario: &Scenario) -> PathBuf {
    out.unwrap_or_else(|| Path::new("runs").join(&scenario.name))
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { source, out, overwrite } => {
            let scenario = Scenario::from_config(&load(&source)?)?;
            let dir = out_dir(out, &scenario);
            let outcome = run::run(&scenario, &dir, overwrite)?;
            println!("{}: {} checkpoint(s) written to {}", scenario.name, outcome.records.len(), dir.display());
        }
        Command::Sweep { source, out, overwrite } => {
            let config = load(&source)?;
            let scenario = Scenario::from_config(&config)?;
            let dir = out_dir(out, &scenario);
            let report = sweep::sweep(&config, &dir, overwrite)?;
            println!(
                "{}: {} point(s), {} failed, {} duplicate(s) dropped; summary in {}",
                scenario.name,
                report.points,
                report.failed,
                report.duplicates,
                dir.join("summary.csv").display()
            );
        }
        Command::Presets { action } => match action {
            None | Some(PresetAction::List) => {
                let width = PRESETS.iter().map(|p| p.name.len()).max().unwrap_or(0);
                for p in PRESETS {
                    println!("{:width$}  {}", p.name, p.summary);
                }
            }
            Some(PresetAction::Show { name }) => {
                let p = presets::find(&name).ok_or_else(|| CliError::config(format!("unknown preset `{name}`")))?;
                print!("{}", p.toml.trim_start());
            }
        },
        Command::Validate { source } => {
            let scenario = Scenario::from_config(&load(&source)?)?;
            let mut summary = serde_json::Map::new();
            summary.insert("name".into(), scenario.name.clone().into());
            if let Some(d) = &scenario.dynamics {
                summary.insert("dynamics".into(), serde_json::to_value(d)?);
            }
            summary.insert("eta_curves".into(), scenario.eta.len().into());
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("catsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
