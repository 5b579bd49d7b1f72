//! `sharp-hardy`: constants, verifiers and sweeps from the command line.
//!
//! Exit codes: 0 when every verdict passes, 1 on a failed verdict, 2 on a
//! configuration error.

mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Failure, Output};
use config::{CommonArgs, Format};

#[derive(Parser)]
#[command(name = "sharp-hardy", version, about = "Numerical checks of sharp Hardy and Rellich inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sharp constants, extremal exponents and Rellich admissibility
    Constants(CommonArgs),
    /// Residual of the pointwise identity over random pairs
    Identity(CommonArgs),
    /// Hardy chain and auxiliary Hardy inequality on random bumps
    VerifyHardy(CommonArgs),
    /// Rellich inequality on random bumps
    VerifyRellich(CommonArgs),
    /// Extremal-sequence sweep and fitted constant
    Sharpness(CommonArgs),
    /// p-harmonicity of the fundamental solution and the gauge identity
    Harmonicity(CommonArgs),
    /// Reduced fixed-seed battery over all frames
    Selftest(CommonArgs),
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let (args, default_samples) = match &cli.command {
        Command::Identity(a) => (a, 10_000),
        Command::Harmonicity(a) => (a, 1_000),
        Command::Constants(a) | Command::VerifyHardy(a) | Command::VerifyRellich(a) | Command::Sharpness(a) => {
            (a, 200_000)
        }
        Command::Selftest(a) => (a, 0),
    };
    let cfg = args.resolve(default_samples)?;
    let csv = cfg.format == Format::Csv;
    if csv && !matches!(cli.command, Command::Sharpness(_)) {
        return Err(Failure::Config("--format csv is only available for sharpness".into()));
    }
    match cli.command {
        Command::Constants(_) => commands::constants(&cfg),
        Command::Identity(_) => commands::identity(&cfg),
        Command::VerifyHardy(_) => commands::verify_hardy(&cfg),
        Command::VerifyRellich(_) => commands::verify_rellich(&cfg),
        Command::Sharpness(_) => commands::sharpness(&cfg, csv),
        Command::Harmonicity(_) => commands::harmonicity(&cfg),
        Command::Selftest(_) => commands::selftest(&cfg),
    }
    .and_then(|out| {
        match &cfg.out {
            Some(path) => std::fs::write(path, &out.body)
                .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?,
            None => std::io::stdout()
                .write_all(out.body.as_bytes())
                .map_err(|e| Failure::Runtime(e.to_string()))?,
        }
        Ok(out)
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) if out.pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
