//! Synthetic Gaussian-world morphing demo.
//!
//! Draws identity pairs with a fixed mean separation, samples one bona fide
//! input per identity, morphs each pair, and reports how often the morph
//! lands closer to the interpolated semantic code than to either endpoint
//! code.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use diffmorph_core::{
    analytic_gaussian_predictor, diffusion_morph, identity_semantic_encoder, lerp,
    make_linear_schedule, GaussianWorld, MorphConfig, StateVector, Variant,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::json;

use crate::io::ingest_premorph_vectors;
use crate::report::{digest_file, write_atomic, Report};
use crate::rng::task_rng;

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Run seed; all randomness derives from it.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output directory for morphs.csv and report.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Morph variant: a, b, c, or external.
    #[arg(long, default_value = "c")]
    pub variant: String,
    #[arg(long, default_value_t = 0.5)]
    pub gamma_z: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma_x: f64,
    #[arg(long, default_value_t = 250)]
    pub n_encode: usize,
    #[arg(long, default_value_t = 100)]
    pub n_decode: usize,
    /// Signal dimension of the synthetic world.
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    /// Within-identity standard deviation s.
    #[arg(long, default_value_t = 1.0)]
    pub std: f64,
    /// Distance between the two identity means of a pair.
    #[arg(long, default_value_t = 4.0)]
    pub separation: f64,
    /// Scale of the random placement of pair centers.
    #[arg(long, default_value_t = 1.0)]
    pub center_spread: f64,
    /// Number of independent morph pairs.
    #[arg(long, default_value_t = 16)]
    pub pairs: usize,
    /// Diffusion step count T.
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub beta_start: f64,
    #[arg(long, default_value_t = 0.02)]
    pub beta_end: f64,
    /// Pre-morphed vectors, one row per pair; required by --variant external.
    #[arg(long)]
    pub premorph_file: Option<PathBuf>,
}

fn normal_vec(rng: &mut ChaCha8Rng, d: usize) -> StateVector {
    StateVector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

pub fn run(args: &DemoArgs) -> Result<()> {
    let variant: Variant = args.variant.parse()?;
    if args.premorph_file.is_some() && variant != Variant::External {
        bail!("--premorph-file is only meaningful with --variant external");
    }

    let sched = make_linear_schedule(args.steps, args.beta_start, args.beta_end)?;
    let world = GaussianWorld::new(args.std, args.dim)?;
    let predictor = analytic_gaussian_predictor(world, &sched);
    let encoder = identity_semantic_encoder();

    let mut inputs = Vec::new();
    let premorphs = match (variant, &args.premorph_file) {
        (Variant::External, Some(path)) => {
            let vectors = ingest_premorph_vectors(path, args.dim)?;
            if vectors.len() < args.pairs {
                bail!(
                    "{}: {} pre-morph rows but {} pairs requested",
                    path.display(),
                    vectors.len(),
                    args.pairs
                );
            }
            inputs.push(digest_file(path)?);
            Some(vectors)
        }
        (Variant::External, None) => bail!("--variant external requires --premorph-file"),
        _ => None,
    };

    let mut csv = format!(
        "pair_id,{}\n",
        (0..args.dim).map(|i| format!("f_{i}")).collect::<Vec<_>>().join(",")
    );
    let mut wins = 0usize;
    let mut sum_mid = 0.0;
    let mut sum_end = 0.0;
    for pair in 0..args.pairs {
        let mut rng = task_rng(args.seed, pair as u64);
        let direction = {
            let v = normal_vec(&mut rng, args.dim);
            &v / v.norm()
        };
        let center = normal_vec(&mut rng, args.dim) * args.center_spread;
        let mu_a = &center + &direction * (args.separation / 2.0);
        let mu_b = &center - &direction * (args.separation / 2.0);
        let x_a = &mu_a + normal_vec(&mut rng, args.dim) * args.std;
        let x_b = &mu_b + normal_vec(&mut rng, args.dim) * args.std;

        let cfg = MorphConfig {
            gamma_z: args.gamma_z,
            gamma_x: args.gamma_x,
            variant,
            n_encode: args.n_encode,
            n_decode: args.n_decode,
            external_premorph: premorphs.as_ref().map(|p| p[pair].clone()),
        };
        let morph = diffusion_morph(&x_a, &x_b, &cfg, &sched, &predictor, &encoder)
            .with_context(|| format!("pair {pair}"))?;

        // The identity encoder makes the inputs their own semantic codes.
        let z_mid = lerp(&x_a, &x_b, args.gamma_z)?;
        let d_mid = (&morph - &z_mid).norm();
        let d_a = (&morph - &x_a).norm();
        let d_b = (&morph - &x_b).norm();
        if d_mid < d_a && d_mid < d_b {
            wins += 1;
        }
        sum_mid += d_mid;
        sum_end += 0.5 * (d_a + d_b);

        let feats: Vec<String> = morph.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(csv, "pair{pair:04},{}", feats.join(","));
    }

    write_atomic(&args.out.join("morphs.csv"), csv.as_bytes())?;

    let config = json!({
        "variant": variant.to_string(),
        "gamma_z": args.gamma_z,
        "gamma_x": args.gamma_x,
        "n_encode": args.n_encode,
        "n_decode": args.n_decode,
        "dim": args.dim,
        "std": args.std,
        "separation": args.separation,
        "center_spread": args.center_spread,
        "pairs": args.pairs,
        "steps": args.steps,
        "beta_start": args.beta_start,
        "beta_end": args.beta_end,
        "premorph_file": args.premorph_file.as_ref().map(|p| p.display().to_string()),
    });
    let results = json!({
        "pairs": args.pairs,
        "midpoint_wins": wins,
        "midpoint_win_fraction": wins as f64 / args.pairs as f64,
        "mean_distance_to_midpoint_code": sum_mid / args.pairs as f64,
        "mean_distance_to_endpoint_codes": sum_end / args.pairs as f64,
        "morphs_file": "morphs.csv",
    });
    let notes = json!({
        "world": "x0 | z ~ N(z, std^2 I) with the identity semantic encoder",
        "midpoint_statistic": "fraction of morphs nearer the interpolated code than either endpoint code",
    });
    let report = Report::new("demo-morph", Some(args.seed), config, inputs, results, notes);
    report.write(&args.out.join("report.json"))?;
    Ok(())
}
