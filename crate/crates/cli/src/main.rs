//! Batch CLI: synthetic morphing demos, metric evaluation over flat files,
//! threshold calibration, and fixture emission.
//!
//! Exit codes: 0 on success, 2 for input/schema/configuration errors, 3
//! when a metric is mathematically undefined on the given input (e.g. a
//! zero transferability denominator without smoothing).

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use diffmorph_cli::commands;

#[derive(Parser)]
#[command(
    name = "diffmorph",
    version,
    about = "Diffusion morphing demos and biometric metric evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Morph synthetic identity pairs and report midpoint proximity.
    DemoMorph(commands::demo::DemoArgs),
    /// Evaluate fid, mmpmr, apcer, or rsm over ingested files.
    Eval {
        #[command(subcommand)]
        metric: commands::eval::EvalCommand,
    },
    /// Calibrate an FMR or BPCER threshold from a score file.
    Calibrate {
        #[command(subcommand)]
        target: commands::calibrate::CalibrateCommand,
    },
    /// Bundled desk-scale fixtures.
    Fixtures {
        #[command(subcommand)]
        action: commands::fixtures::FixturesCommand,
    },
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::DemoMorph(args) => commands::demo::run(args),
        Command::Eval { metric } => commands::eval::run(metric),
        Command::Calibrate { target } => commands::calibrate::run(target),
        Command::Fixtures { action } => commands::fixtures::run(action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let undefined = err
                .chain()
                .filter_map(|cause| cause.downcast_ref::<diffmorph_core::Error>())
                .any(|e| e.is_undefined_metric());
            if undefined {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
