//! Bundled desk-scale fixtures.
//!
//! The embedding fixture is built so ProdAvg-MMPMR at the FMR-calibrated
//! threshold works out to exactly 0.375 by hand, and the decision fixture
//! gives a relative strength of exactly ln 2 between the two attacks.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Subcommand};

use crate::report::write_atomic;

#[derive(Debug, Subcommand)]
pub enum FixturesCommand {
    /// Write the bundled fixture files into a directory.
    Emit(EmitArgs),
}

#[derive(Debug, Args)]
pub struct EmitArgs {
    /// Target directory.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn embeddings_diffusion() -> &'static str {
    // Morph m_ab: identity a keeps indicators {1, 0} at threshold 2, b keeps {1};
    // morph m_cd: both identities keep {1, 0}. Mean(0.5, 0.25) = 0.375.
    // The *_src images sit well inside the threshold and must be excluded.
    "kind,identity_a,identity_b,image_id,source_ids,f_0,f_1\n\
     bona,a,,a1,,0.5,0\n\
     bona,a,,a2,,2,0\n\
     bona,a,,a_src,,0.1,0\n\
     bona,b,,b1,,0.5,0\n\
     bona,b,,b_src,,0.1,0\n\
     bona,c,,c1,,0.5,0\n\
     bona,c,,c2,,2,0\n\
     bona,d,,d1,,0.5,0\n\
     bona,d,,d2,,2,0\n\
     morph,a,b,m_ab,a_src;b_src,0,0\n\
     morph,c,d,m_cd,,0,0\n"
}

pub fn embeddings_landmark() -> &'static str {
    "kind,identity_a,identity_b,image_id,source_ids,f_0,f_1\n\
     bona,a,,a1,,0.5,0\n\
     bona,a,,a2,,2,0\n\
     bona,b,,b1,,0.5,0\n\
     bona,c,,c1,,0.5,0\n\
     bona,c,,c2,,2,0\n\
     bona,d,,d1,,0.5,0\n\
     bona,d,,d2,,2,0\n\
     morph,a,b,lm_ab,,1.5,0.5\n\
     morph,c,d,lm_cd,,1.7,-0.3\n"
}

pub fn decisions() -> &'static str {
    // T(diffusion, landmark) = 2/4, T(landmark, diffusion) = 1/4: RSM ln 2.
    "detector,attack,pair_id,decision\n\
     diffusion,diffusion,p1,1\n\
     diffusion,diffusion,p2,1\n\
     diffusion,diffusion,p3,1\n\
     diffusion,diffusion,p4,1\n\
     diffusion,landmark,p1,1\n\
     diffusion,landmark,p2,1\n\
     diffusion,landmark,p3,0\n\
     diffusion,landmark,p4,0\n\
     landmark,landmark,p1,1\n\
     landmark,landmark,p2,1\n\
     landmark,landmark,p3,1\n\
     landmark,landmark,p4,1\n\
     landmark,diffusion,p1,1\n\
     landmark,diffusion,p2,0\n\
     landmark,diffusion,p3,0\n\
     landmark,diffusion,p4,0\n"
}

pub fn scores() -> String {
    // Impostor 1..=1000: FMR 0.1% calibrates to exactly 2.
    // Genuine 1..=100: BPCER 5% rejects exactly the top five.
    let mut out = String::from("kind,score\n");
    for i in 1..=100 {
        let _ = writeln!(out, "genuine,{i}");
    }
    for i in 1..=1000 {
        let _ = writeln!(out, "impostor,{i}");
    }
    for m in [0.5, 1.5, 2.5, 96.5] {
        let _ = writeln!(out, "morph,{m}");
    }
    out
}

pub fn run(cmd: &FixturesCommand) -> Result<()> {
    let FixturesCommand::Emit(args) = cmd;
    let files: [(&str, String); 4] = [
        ("embeddings_diffusion.csv", embeddings_diffusion().to_string()),
        ("embeddings_landmark.csv", embeddings_landmark().to_string()),
        ("decisions.csv", decisions().to_string()),
        ("scores.csv", scores()),
    ];
    for (name, content) in files {
        let path = args.out.join(name);
        write_atomic(&path, content.as_bytes())?;
        println!("{}", path.display());
    }
    Ok(())
}
