//! Report emission with provenance.
//!
//! Every report carries the tool version, the resolved configuration and
//! its digest, and a digest of every input file, so identical digests imply
//! bit-identical results. Files are written atomically (temp + rename) and
//! contain no timestamps.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub fn tool() -> Tool {
    Tool {
        name: "diffmorph",
        version: env!("CARGO_PKG_VERSION"),
    }
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: Tool,
    pub command: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub config_digest: String,
    pub inputs: Vec<InputDigest>,
    pub results: serde_json::Value,
    pub notes: serde_json::Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_file(path: &Path) -> Result<InputDigest> {
    let bytes = fs::read(path).with_context(|| format!("cannot read '{}'", path.display()))?;
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    })
}

impl Report {
    pub fn new(
        command: &str,
        seed: Option<u64>,
        config: serde_json::Value,
        inputs: Vec<InputDigest>,
        results: serde_json::Value,
        notes: serde_json::Value,
    ) -> Self {
        let config_digest = sha256_hex(config.to_string().as_bytes());
        Report {
            tool: tool(),
            command: command.to_string(),
            seed,
            config,
            config_digest,
            inputs,
            results,
            notes,
        }
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

/// Write via a temporary sibling and rename, so readers never observe a
/// half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("cannot create '{}'", parent.display()))?;
        }
    }
    let mut tmp = PathBuf::from(path);
    let mut name = tmp.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    tmp.set_file_name(name);
    fs::write(&tmp, bytes).with_context(|| format!("cannot write '{}'", tmp.display()))?;
    fs::rename(&tmp, path)
        .with_context(|| format!("cannot move '{}' into place", tmp.display()))?;
    Ok(())
}

/// Sibling path with the same stem and a different extension, for optional
/// CSV table output next to the JSON report.
pub fn with_extension(path: &Path, ext: &str) -> PathBuf {
    let mut out = PathBuf::from(path);
    out.set_extension(ext);
    out
}
