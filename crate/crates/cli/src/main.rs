mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, CommandFactory, FromArgMatches, Parser, Subcommand};

use crate::report::{CliError, EXIT_FAILURE};

/// Sizes solar PV and battery storage against hourly demand by levelized cost.
#[derive(Debug, Parser)]
#[command(name = "hsize", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration; relative paths inside resolve against its directory.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Print the resolved configuration and exit.
    #[arg(long = "print-config", global = true)]
    print_config: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Compose an hourly demand series from class templates.
    SynthDemand,
    /// Enumerate and price the PV/storage design space.
    DesignSpace,
    /// Find the optimal design for every year of the cost projection.
    Sweep,
    /// Dispatch trace for one design point.
    Simulate,
}

fn command() -> clap::Command {
    let mut cmd = Cli::command();
    for (section, key) in config::KEYS {
        let help = if section.is_empty() {
            format!("Override '{key}'")
        } else {
            format!("Override '{section}.{key}'")
        };
        let mut arg = Arg::new(*key)
            .long(*key)
            .global(true)
            .value_name("VALUE")
            .help(help);
        let kebab = key.replace('_', "-");
        if kebab != *key {
            arg = arg.alias(kebab);
        }
        if *key == "out_dir" {
            arg = arg.visible_alias("out");
        }
        cmd = cmd.arg(arg);
    }
    cmd
}

fn run() -> Result<(), CliError> {
    let matches = command().get_matches();
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    let sub = matches.subcommand().map(|(_, m)| m).unwrap_or(&matches);
    let overrides: Vec<(&str, String)> = config::KEYS
        .iter()
        .filter_map(|(_, key)| {
            sub.get_one::<String>(key)
                .or_else(|| matches.get_one::<String>(key))
                .map(|v| (*key, v.clone()))
        })
        .collect();
    let cwd = std::env::current_dir().map_err(|e| CliError {
        code: EXIT_FAILURE,
        error: "io",
        message: e.to_string(),
        path: None,
        row: None,
    })?;
    let cfg = config::load(cli.config.as_deref(), &overrides, &cwd)?;

    if cli.print_config {
        print!("{}", config::to_toml(&cfg));
        return Ok(());
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError {
            code: EXIT_FAILURE,
            error: "run",
            message: e.to_string(),
            path: None,
            row: None,
        })?;
    let summary = pool.install(|| match cli.command {
        Command::SynthDemand => commands::synth_demand(&cfg),
        Command::DesignSpace => commands::design_space(&cfg),
        Command::Sweep => commands::sweep(&cfg),
        Command::Simulate => commands::simulate(&cfg),
    })?;
    println!("{summary}");
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            e.emit();
            ExitCode::from(e.code as u8)
        }
    }
}
