//! Flat-file ingestion and export.
//!
//! Three CSV schemas, all with a mandatory header and no quoting:
//!
//! * embeddings: `kind,identity_a,identity_b,image_id,source_ids,f_0..f_{d-1}`
//!   where kind is `bona` (identity_b and source_ids empty) or `morph`
//!   (source_ids `;`-separated);
//! * decisions: `detector,attack,pair_id,decision` with decision in {0, 1};
//! * scores: `kind,score` with kind in {genuine, impostor, morph}.
//!
//! Malformed rows are reported with their 1-based line number.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use diffmorph_core::metrics::{EmbeddingTable, MorphEntry, ScoreSet};
use diffmorph_core::rsm::DecisionRecord;
use diffmorph_core::StateVector;

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read '{}'", path.display()))?;
    Ok(text.lines().map(str::to_string).collect())
}

fn feature_header(dim: usize) -> String {
    (0..dim).map(|i| format!("f_{i}")).collect::<Vec<_>>().join(",")
}

fn parse_features(path: &Path, lineno: usize, fields: &[&str]) -> Result<StateVector> {
    let mut values = Vec::with_capacity(fields.len());
    for (i, raw) in fields.iter().enumerate() {
        let v: f64 = raw.parse().with_context(|| {
            format!("{}:{lineno}: column f_{i}: invalid number '{raw}'", path.display())
        })?;
        if !v.is_finite() {
            bail!("{}:{lineno}: column f_{i}: non-finite value", path.display());
        }
        values.push(v);
    }
    Ok(StateVector::from_vec(values))
}

/// Read an embedding table, validating kinds, identity references,
/// duplicate keys, and feature dimensions.
pub fn ingest_embeddings(path: &Path) -> Result<EmbeddingTable> {
    let lines = read_lines(path)?;
    let Some(header) = lines.first() else {
        bail!("{}: empty file", path.display());
    };
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 6 || cols[..5] != ["kind", "identity_a", "identity_b", "image_id", "source_ids"]
    {
        bail!(
            "{}:1: header must be 'kind,identity_a,identity_b,image_id,source_ids,f_0,...'",
            path.display()
        );
    }
    for (i, col) in cols[5..].iter().enumerate() {
        if *col != format!("f_{i}") {
            bail!("{}:1: feature column {} must be named f_{i}", path.display(), i + 6);
        }
    }

    struct BonaRow {
        lineno: usize,
        identity: String,
        image_id: String,
        feature: StateVector,
    }
    struct MorphRow {
        lineno: usize,
        entry: MorphEntry,
    }
    let mut bona_rows = Vec::new();
    let mut morph_rows = Vec::new();

    for (idx, line) in lines.iter().enumerate().skip(1) {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            bail!(
                "{}:{lineno}: expected {} columns, got {}",
                path.display(),
                cols.len(),
                fields.len()
            );
        }
        let (kind, identity_a, identity_b, image_id, source_ids) =
            (fields[0], fields[1], fields[2], fields[3], fields[4]);
        if identity_a.is_empty() || image_id.is_empty() {
            bail!("{}:{lineno}: identity_a and image_id must be nonempty", path.display());
        }
        let feature = parse_features(path, lineno, &fields[5..])?;
        match kind {
            "bona" => {
                if !identity_b.is_empty() || !source_ids.is_empty() {
                    bail!(
                        "{}:{lineno}: bona rows must leave identity_b and source_ids empty",
                        path.display()
                    );
                }
                bona_rows.push(BonaRow {
                    lineno,
                    identity: identity_a.to_string(),
                    image_id: image_id.to_string(),
                    feature,
                });
            }
            "morph" => {
                if identity_b.is_empty() {
                    bail!("{}:{lineno}: morph rows need identity_b", path.display());
                }
                let source_ids: Vec<String> = if source_ids.is_empty() {
                    Vec::new()
                } else {
                    source_ids.split(';').map(str::to_string).collect()
                };
                morph_rows.push(MorphRow {
                    lineno,
                    entry: MorphEntry {
                        image_id: image_id.to_string(),
                        feature,
                        identity_a: identity_a.to_string(),
                        identity_b: identity_b.to_string(),
                        source_ids,
                    },
                });
            }
            other => bail!("{}:{lineno}: unknown kind '{other}'", path.display()),
        }
    }

    let mut table = EmbeddingTable::new();
    for row in bona_rows {
        table
            .add_bona_fide(&row.identity, &row.image_id, row.feature)
            .with_context(|| format!("{}:{}", path.display(), row.lineno))?;
    }
    for row in morph_rows {
        table
            .add_morph(row.entry)
            .with_context(|| format!("{}:{}", path.display(), row.lineno))?;
    }
    Ok(table)
}

/// Order-normalized export; `ingest(export(ingest(f)))` is identical to
/// `ingest(f)` up to row order.
pub fn export_embeddings(table: &EmbeddingTable) -> String {
    let dim = table.dim().unwrap_or(0);
    let mut out = format!("kind,identity_a,identity_b,image_id,source_ids,{}\n", feature_header(dim));
    for identity in table.identities() {
        let mut images: Vec<_> = table.bona_fide_of(identity).unwrap().to_vec();
        images.sort_by(|a, b| a.image_id.cmp(&b.image_id));
        for img in images {
            let feats: Vec<String> = img.feature.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "bona,{identity},,{},,{}", img.image_id, feats.join(","));
        }
    }
    let mut morphs = table.morphs().to_vec();
    morphs.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    for m in morphs {
        let feats: Vec<String> = m.feature.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(
            out,
            "morph,{},{},{},{},{}",
            m.identity_a,
            m.identity_b,
            m.image_id,
            m.source_ids.join(";"),
            feats.join(",")
        );
    }
    out
}

/// Read decision records grouped by (detector, attack).
pub fn ingest_decisions(path: &Path) -> Result<Vec<DecisionRecord>> {
    let lines = read_lines(path)?;
    let Some(header) = lines.first() else {
        bail!("{}: empty file", path.display());
    };
    if header != "detector,attack,pair_id,decision" {
        bail!(
            "{}:1: header must be 'detector,attack,pair_id,decision'",
            path.display()
        );
    }
    // Group in first-seen order; pair lists keep file order.
    let mut order: Vec<(String, String)> = Vec::new();
    let mut groups: Vec<Vec<(String, bool, usize)>> = Vec::new();
    for (idx, line) in lines.iter().enumerate().skip(1) {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            bail!("{}:{lineno}: expected 4 columns, got {}", path.display(), fields.len());
        }
        let (detector, attack, pair_id, decision) = (fields[0], fields[1], fields[2], fields[3]);
        if detector.is_empty() || attack.is_empty() || pair_id.is_empty() {
            bail!("{}:{lineno}: detector, attack, and pair_id must be nonempty", path.display());
        }
        let decision = match decision {
            "0" => false,
            "1" => true,
            other => bail!("{}:{lineno}: decision must be 0 or 1, got '{other}'", path.display()),
        };
        let key = (detector.to_string(), attack.to_string());
        let slot = match order.iter().position(|k| *k == key) {
            Some(i) => i,
            None => {
                order.push(key);
                groups.push(Vec::new());
                groups.len() - 1
            }
        };
        groups[slot].push((pair_id.to_string(), decision, lineno));
    }
    if order.is_empty() {
        bail!("{}: no decision rows", path.display());
    }
    let mut records = Vec::with_capacity(order.len());
    for ((detector, attack), rows) in order.into_iter().zip(groups) {
        let first_line = rows.first().map(|r| r.2).unwrap_or(0);
        let record = DecisionRecord::new(
            detector,
            attack,
            rows.into_iter().map(|(pair, d, _)| (pair, d)),
        )
        .with_context(|| format!("{}:{first_line}: within this record group", path.display()))?;
        records.push(record);
    }
    Ok(records)
}

/// Read a genuine/impostor/morph score file.
pub fn ingest_scores(path: &Path) -> Result<ScoreSet> {
    let lines = read_lines(path)?;
    let Some(header) = lines.first() else {
        bail!("{}: empty file", path.display());
    };
    if header != "kind,score" {
        bail!("{}:1: header must be 'kind,score'", path.display());
    }
    let mut genuine = Vec::new();
    let mut impostor = Vec::new();
    let mut morph = Vec::new();
    for (idx, line) in lines.iter().enumerate().skip(1) {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            bail!("{}:{lineno}: expected 2 columns, got {}", path.display(), fields.len());
        }
        let score: f64 = fields[1]
            .parse()
            .with_context(|| format!("{}:{lineno}: invalid score '{}'", path.display(), fields[1]))?;
        match fields[0] {
            "genuine" => genuine.push(score),
            "impostor" => impostor.push(score),
            "morph" => morph.push(score),
            other => bail!("{}:{lineno}: unknown kind '{other}'", path.display()),
        }
    }
    ScoreSet::new(genuine, impostor, morph)
        .with_context(|| format!("{}: invalid scores", path.display()))
}

/// Read one pre-morphed vector per row; used by the external morph variant.
pub fn ingest_premorph_vectors(path: &Path, dim: usize) -> Result<Vec<StateVector>> {
    let lines = read_lines(path)?;
    let Some(header) = lines.first() else {
        bail!("{}: empty file", path.display());
    };
    if *header != feature_header(dim) {
        bail!("{}:1: header must be '{}'", path.display(), feature_header(dim));
    }
    let mut vectors = Vec::new();
    for (idx, line) in lines.iter().enumerate().skip(1) {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim {
            bail!("{}:{lineno}: expected {dim} columns, got {}", path.display(), fields.len());
        }
        vectors.push(parse_features(path, lineno, &fields)?);
    }
    Ok(vectors)
}
