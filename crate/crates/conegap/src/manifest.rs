//! Configuration hashing and the run manifest.

use crate::config::Config;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io;
use std::path::Path;

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the canonical JSON form of the effective configuration, i.e. after
/// command-line overrides such as `--seed` are applied. The output directory
/// is not part of the experiment and is left out.
pub fn config_hash(cfg: &Config) -> String {
    let mut cfg = cfg.clone();
    cfg.output.dir = Default::default();
    let canonical = serde_json::to_vec(&cfg).expect("config serializes");
    sha256_hex(&canonical)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandEntry {
    pub config_hash: String,
    pub seed: u64,
    pub threads: usize,
    /// Excluded from the determinism guarantee.
    pub wall_clock_ms: u128,
    pub outputs: Vec<OutputEntry>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub versions: BTreeMap<String, String>,
    pub commands: BTreeMap<String, CommandEntry>,
}

impl RunManifest {
    /// Reads the manifest in `dir`, or starts an empty one.
    pub fn load_or_default(dir: &Path) -> Self {
        std::fs::read(dir.join(MANIFEST_FILE))
            .ok()
            .and_then(|b| serde_json::from_slice(&b).ok())
            .unwrap_or_default()
    }

    pub fn record(&mut self, command: &str, entry: CommandEntry) {
        self.versions.insert("conegap".into(), env!("CARGO_PKG_VERSION").into());
        self.versions
            .insert("conegap-core".into(), conegap_core::VERSION.into());
        self.commands.insert(command.into(), entry);
    }

    pub fn save(&self, dir: &Path) -> io::Result<()> {
        let mut s = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        s.push('\n');
        std::fs::write(dir.join(MANIFEST_FILE), s)
    }
}

pub fn output_entries(files: &[std::path::PathBuf]) -> io::Result<Vec<OutputEntry>> {
    files
        .iter()
        .map(|p| {
            let bytes = std::fs::read(p)?;
            Ok(OutputEntry {
                file: p
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                sha256: sha256_hex(&bytes),
            })
        })
        .collect()
}
