//! Threshold calibration commands.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use diffmorph_core::metrics::{bpcer_threshold, calibrate_threshold_fmr};
use serde_json::json;

use super::OutputFormat;
use crate::io::ingest_scores;
use crate::report::{digest_file, with_extension, write_atomic, Report};

#[derive(Debug, Subcommand)]
pub enum CalibrateCommand {
    /// Verification threshold at a target false match rate (impostor scores).
    Fmr(CalibrateArgs),
    /// Detection threshold at a target bona fide rejection rate (genuine scores).
    Bpcer(CalibrateArgs),
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Score file; fmr uses its impostor rows, bpcer its genuine rows.
    #[arg(long)]
    pub scores: PathBuf,
    /// Target rate in (0, 1).
    #[arg(long)]
    pub target: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

pub fn run(cmd: &CalibrateCommand) -> Result<()> {
    let (name, args) = match cmd {
        CalibrateCommand::Fmr(args) => ("fmr", args),
        CalibrateCommand::Bpcer(args) => ("bpcer", args),
    };
    let scores = ingest_scores(&args.scores)?;
    let inputs = vec![digest_file(&args.scores)?];

    let (threshold, achieved, n) = match cmd {
        CalibrateCommand::Fmr(_) => {
            let gamma = calibrate_threshold_fmr(&scores.impostor, args.target)
                .context("calibrating FMR threshold")?;
            let achieved = scores.impostor.iter().filter(|&&d| d < gamma).count() as f64
                / scores.impostor.len() as f64;
            (gamma, achieved, scores.impostor.len())
        }
        CalibrateCommand::Bpcer(_) => {
            let theta = bpcer_threshold(&scores.genuine, args.target)
                .context("calibrating BPCER threshold")?;
            let achieved = scores.genuine.iter().filter(|&&d| d >= theta).count() as f64
                / scores.genuine.len() as f64;
            (theta, achieved, scores.genuine.len())
        }
    };

    let config = json!({
        "scores": args.scores.display().to_string(),
        "target": args.target,
    });
    let results = json!({
        "threshold": threshold,
        "achieved_rate": achieved,
        "n_comparisons": n,
    });
    let notes = json!({
        "rule": "conservative: the achieved rate never exceeds the target",
        "match_rule": "strict less-than for matches; ties never split",
    });
    Report::new(&format!("calibrate {name}"), None, config, inputs, results, notes)
        .write(&args.out)?;
    if args.format == OutputFormat::Csv {
        let mut csv = String::from("target,threshold,achieved_rate,n_comparisons\n");
        let _ = writeln!(csv, "{},{threshold},{achieved},{n}", args.target);
        write_atomic(&with_extension(&args.out, "csv"), csv.as_bytes())?;
    }
    Ok(())
}
