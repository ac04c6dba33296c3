//! Run manifests: the resolved configuration, input/output digests, seed,
//! and phase timings of one CLI run.
//!
//! JSON outputs name the manifest file that produced them; the manifest
//! carries SHA-256 digests for every input and output, including the
//! fixed-format files (shards, CSV, binary embeddings) that cannot embed a
//! reference themselves. Manifests record wall-clock timings, so they are
//! the one run artifact not expected to be byte-identical across runs.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    /// Fully resolved configuration (flags > config file > defaults).
    pub config: BTreeMap<String, String>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub timings_ms: BTreeMap<String, u64>,
}

impl RunManifest {
    pub fn new(subcommand: &str, version: &str) -> Self {
        RunManifest {
            tool: "corpusbias".into(),
            version: version.into(),
            subcommand: subcommand.into(),
            seed: None,
            config: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn set_config(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.to_string(), value.to_string());
    }

    pub fn add_input(&mut self, path: &Path) -> io::Result<()> {
        self.inputs.push(digest_path(path)?);
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path) -> io::Result<()> {
        self.outputs.push(digest_path(path)?);
        Ok(())
    }

    pub fn record_timing(&mut self, phase: &str, elapsed: std::time::Duration) {
        self.timings_ms
            .insert(phase.to_string(), elapsed.as_millis() as u64);
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, json + "\n")
    }
}

/// SHA-256 of a file, streaming. Directories digest their (sorted) file
/// list recursively.
pub fn digest_path(path: &Path) -> io::Result<FileDigest> {
    if path.is_dir() {
        let mut hasher = Sha256::new();
        let mut total = 0u64;
        let mut entries: Vec<_> = fs::read_dir(path)?
            .collect::<io::Result<Vec<_>>>()?
            .into_iter()
            .map(|e| e.path())
            .collect();
        entries.sort();
        for entry in entries {
            if entry.is_file() {
                let d = digest_path(&entry)?;
                hasher.update(d.path.as_bytes());
                hasher.update(d.sha256.as_bytes());
                total += d.bytes;
            }
        }
        return Ok(FileDigest {
            path: path.display().to_string(),
            sha256: hex(&hasher.finalize()),
            bytes: total,
        });
    }
    let mut file = fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    let mut total = 0u64;
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        total += n as u64;
    }
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: hex(&hasher.finalize()),
        bytes: total,
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
