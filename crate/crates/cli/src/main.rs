use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qidiode_cli::commands::{run_dispersion, run_lattice_otoc, run_otoc, run_rectify, CommandError};
use qidiode_cli::load_config;
use qidiode_cli::table::OutputTable;
use qidiode_cli::validate::run_validate;

/// Nonreciprocal magnon OTOC and rectification simulator.
#[derive(Debug, Parser)]
#[command(name = "qidiode", version)]
struct Cli {
    /// Configuration file (`key = value`, optional [model] / [run] sections).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,

    /// Override a config key, e.g. `--set d=0.5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Both dispersion branches and group velocities over the zone.
    Dispersion,
    /// Left and right OTOC time series.
    Otoc,
    /// Rectification coefficient against DMI strength.
    Rectify,
    /// Exact lattice OTOC against the closed form.
    LatticeOtoc,
    /// Run the full invariant suite.
    Validate,
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write `{}`: {e}", path.display())),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write to stdout: {e}")),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    let config = match load_config(cli.config.as_deref(), &cli.set) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    if let Command::Validate = cli.command {
        let report = run_validate(&config);
        if let Err(e) = emit(&report.to_string(), cli.out.as_ref()) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        return ExitCode::from(report.exit_code() as u8);
    }

    let result: Result<OutputTable, CommandError> = match cli.command {
        Command::Dispersion => run_dispersion(&config),
        Command::Otoc => run_otoc(&config),
        Command::Rectify => run_rectify(&config),
        Command::LatticeOtoc => run_lattice_otoc(&config),
        Command::Validate => unreachable!(),
    };
    match result {
        Ok(table) => {
            let text = if cli.json { table.to_json() } else { table.to_csv() };
            match emit(&text, cli.out.as_ref()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
