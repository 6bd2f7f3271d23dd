//! Metric evaluation over ingested files: per-attack FID, ProdAvg-MMPMR at
//! a calibrated or explicit threshold, APCER at BPCER operating points, and
//! the pairwise RSM matrix.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use diffmorph_core::metrics::{
    apcer_at, bpcer_threshold, calibrate_threshold_fmr, fit_gaussian, frechet_distance,
    mmpmr_prodavg_with, EmbeddingTable, EmptyIdentityPolicy,
};
use diffmorph_core::rsm::{rsm_matrix, Smoothing};
use serde_json::json;

use super::OutputFormat;
use crate::io::{ingest_decisions, ingest_embeddings, ingest_scores};
use crate::report::{digest_file, with_extension, write_atomic, Report};

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Fréchet distance between morph and bona fide Gaussian fits, per attack.
    Fid(FidArgs),
    /// ProdAvg-MMPMR over an embedding table.
    Mmpmr(MmpmrArgs),
    /// APCER at one or more BPCER operating points.
    Apcer(ApcerArgs),
    /// Pairwise relative-strength matrix from detector decisions.
    Rsm(RsmArgs),
}

pub fn run(cmd: &EvalCommand) -> Result<()> {
    match cmd {
        EvalCommand::Fid(args) => run_fid(args),
        EvalCommand::Mmpmr(args) => run_mmpmr(args),
        EvalCommand::Apcer(args) => run_apcer(args),
        EvalCommand::Rsm(args) => run_rsm(args),
    }
}

fn write_table(out: &Path, format: OutputFormat, table: &str) -> Result<()> {
    if format == OutputFormat::Csv {
        write_atomic(&with_extension(out, "csv"), table.as_bytes())?;
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct FidArgs {
    /// Embedding table, repeatable; label with `name=path` (default: file stem).
    #[arg(long = "embeddings", required = true)]
    pub embeddings: Vec<String>,
    /// Report path (JSON).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

fn parse_labeled(spec: &str) -> (String, PathBuf) {
    match spec.split_once('=') {
        Some((label, path)) => (label.to_string(), PathBuf::from(path)),
        None => {
            let path = PathBuf::from(spec);
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| spec.to_string());
            (label, path)
        }
    }
}

fn run_fid(args: &FidArgs) -> Result<()> {
    let mut inputs = Vec::new();
    let mut rows = Vec::new();
    let mut table = String::from("attack,fid,n_bona,n_morphs\n");
    for spec in &args.embeddings {
        let (label, path) = parse_labeled(spec);
        let embeddings = ingest_embeddings(&path)?;
        inputs.push(digest_file(&path)?);
        let bona: Vec<_> = embeddings.bona_fide_features().into_iter().cloned().collect();
        let morphs: Vec<_> = embeddings.morph_features().into_iter().cloned().collect();
        let g_bona = fit_gaussian(&bona)
            .with_context(|| format!("{label}: fitting bona fide activations"))?;
        let g_morph = fit_gaussian(&morphs)
            .with_context(|| format!("{label}: fitting morph activations"))?;
        let fid = frechet_distance(&g_morph, &g_bona)
            .with_context(|| format!("{label}: frechet distance"))?;
        let _ = writeln!(table, "{label},{fid},{},{}", bona.len(), morphs.len());
        rows.push(json!({
            "attack": label,
            "fid": fid,
            "n_bona": bona.len(),
            "n_morphs": morphs.len(),
        }));
    }
    let config = json!({ "embeddings": args.embeddings });
    let results = json!({ "rows": rows });
    let notes = json!({
        "convention": "squared Frechet distance (squared 2-Wasserstein) between Gaussian fits; lower is closer to bona fide",
        "covariance": "unbiased (n-1) estimator",
    });
    Report::new("eval fid", None, config, inputs, results, notes).write(&args.out)?;
    write_table(&args.out, args.format, &table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OnEmptyIdentity {
    /// Fail when a morph's identity has no remaining bona fide images.
    #[default]
    Error,
    /// Drop such morphs from the outer mean.
    Skip,
}

#[derive(Debug, Args)]
pub struct MmpmrArgs {
    /// Embedding table with bona fide and morph rows.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Explicit verification threshold; alternative to FMR calibration.
    #[arg(long, conflicts_with_all = ["impostor_scores", "fmr"])]
    pub threshold: Option<f64>,
    /// Score file providing the impostor protocol for FMR calibration.
    #[arg(long, requires = "fmr")]
    pub impostor_scores: Option<PathBuf>,
    /// Target false match rate, e.g. 0.001.
    #[arg(long, requires = "impostor_scores")]
    pub fmr: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub on_empty: OnEmptyIdentity,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

fn run_mmpmr(args: &MmpmrArgs) -> Result<()> {
    let mut inputs = Vec::new();
    let table: EmbeddingTable = ingest_embeddings(&args.embeddings)?;
    inputs.push(digest_file(&args.embeddings)?);

    let (threshold, source, fmr) = match (args.threshold, &args.impostor_scores, args.fmr) {
        (Some(t), None, None) => (t, "explicit", None),
        (None, Some(path), Some(fmr)) => {
            let scores = ingest_scores(path)?;
            inputs.push(digest_file(path)?);
            let gamma = calibrate_threshold_fmr(&scores.impostor, fmr)
                .context("calibrating threshold from impostor scores")?;
            (gamma, "fmr-calibrated", Some(fmr))
        }
        _ => bail!("provide either --threshold or both --impostor-scores and --fmr"),
    };

    let policy = match args.on_empty {
        OnEmptyIdentity::Error => EmptyIdentityPolicy::Error,
        OnEmptyIdentity::Skip => EmptyIdentityPolicy::SkipMorph,
    };
    let value = mmpmr_prodavg_with(&table, threshold, policy)?;

    let config = json!({
        "embeddings": args.embeddings.display().to_string(),
        "threshold": args.threshold,
        "impostor_scores": args.impostor_scores.as_ref().map(|p| p.display().to_string()),
        "fmr": args.fmr,
        "on_empty": format!("{:?}", args.on_empty).to_lowercase(),
    });
    let results = json!({
        "threshold": threshold,
        "threshold_source": source,
        "fmr": fmr,
        "mmpmr": value,
        "n_morphs": table.morphs().len(),
    });
    let notes = json!({
        "variant": "ProdAvg: mean over morphs of the per-identity average match indicator product",
        "match_rule": "L2 distance strictly below the threshold",
        "exclusion": "each morph's source images are excluded from its own identities",
    });
    Report::new("eval mmpmr", None, config, inputs, results, notes).write(&args.out)?;
    let mut csv = String::from("threshold,mmpmr,n_morphs\n");
    let _ = writeln!(csv, "{threshold},{value},{}", table.morphs().len());
    write_table(&args.out, args.format, &csv)
}

#[derive(Debug, Args)]
pub struct ApcerArgs {
    /// Score file with genuine and morph rows.
    #[arg(long)]
    pub scores: PathBuf,
    /// BPCER operating points, comma separated (e.g. 0.001,0.01,0.05).
    #[arg(long, value_delimiter = ',', required = true)]
    pub bpcer: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

fn run_apcer(args: &ApcerArgs) -> Result<()> {
    let scores = ingest_scores(&args.scores)?;
    let inputs = vec![digest_file(&args.scores)?];
    let mut rows = Vec::new();
    let mut csv = String::from("bpcer_target,threshold,achieved_bpcer,apcer\n");
    for &target in &args.bpcer {
        let threshold = bpcer_threshold(&scores.genuine, target)
            .with_context(|| format!("calibrating threshold at BPCER {target}"))?;
        let achieved = scores.genuine.iter().filter(|&&g| g >= threshold).count() as f64
            / scores.genuine.len() as f64;
        let apcer = apcer_at(&scores.morph, threshold)?;
        let _ = writeln!(csv, "{target},{threshold},{achieved},{apcer}");
        rows.push(json!({
            "bpcer_target": target,
            "threshold": threshold,
            "achieved_bpcer": achieved,
            "apcer": apcer,
        }));
    }
    let config = json!({
        "scores": args.scores.display().to_string(),
        "bpcer": args.bpcer,
    });
    let results = json!({ "rows": rows });
    let notes = json!({
        "detector": "differential: reject when distance >= threshold",
        "apcer": "fraction of morph comparisons accepted (distance strictly below threshold)",
    });
    Report::new("eval apcer", None, config, inputs, results, notes).write(&args.out)?;
    write_table(&args.out, args.format, &csv)
}

#[derive(Debug, Args)]
pub struct RsmArgs {
    /// Decision file covering every (detector, attack) combination.
    #[arg(long)]
    pub decisions: PathBuf,
    /// Apply add-one smoothing to the transferability counts.
    #[arg(long)]
    pub smoothing: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

fn run_rsm(args: &RsmArgs) -> Result<()> {
    let records = ingest_decisions(&args.decisions)?;
    let inputs = vec![digest_file(&args.decisions)?];
    let smoothing = if args.smoothing {
        Smoothing::AddOne
    } else {
        Smoothing::None
    };
    let matrix = rsm_matrix(&records, smoothing)?;

    let mut csv = format!("attack,{}\n", matrix.attacks.join(","));
    for (i, row) in matrix.values.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(csv, "{},{}", matrix.attacks[i], cells.join(","));
    }

    let config = json!({
        "decisions": args.decisions.display().to_string(),
        "smoothing": args.smoothing,
    });
    let results = json!({
        "attacks": matrix.attacks,
        "matrix": matrix.values,
    });
    let notes = json!({
        "log": "natural",
        "smoothing": if args.smoothing { "add-one on joint and marginal counts" } else { "none" },
        "sign": "positive means the row attack is stronger than the column attack",
    });
    Report::new("eval rsm", None, config, inputs, results, notes).write(&args.out)?;
    write_table(&args.out, args.format, &csv)
}
