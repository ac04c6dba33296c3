//! Subcommand implementations.

pub mod compare;
pub mod ingest;
pub mod reference;
pub mod report;
pub mod stats;
pub mod sweep;
pub mod synth;
pub mod train;
pub mod weat;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use corpusbias::embedding::{load_binary, load_text, EmbeddingSet, FORMAT_MAGIC};
use corpusbias::manifest::RunManifest;
use corpusbias::weat::WordSets;

use crate::config::FileConfig;
use crate::{internal, invalid, CliError};

pub struct Ctx {
    pub config: FileConfig,
    pub threads: usize,
    pub version: &'static str,
}

impl Ctx {
    pub fn manifest(&self, subcommand: &str) -> RunManifest {
        RunManifest::new(subcommand, self.version)
    }
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("output")
        .to_string()
}

/// Load an embedding file, sniffing binary (magic bytes) vs text.
pub fn load_embeddings(path: &Path) -> Result<EmbeddingSet, CliError> {
    let head = fs::read(path)
        .ok()
        .filter(|b| b.len() >= 4)
        .map(|b| [b[0], b[1], b[2], b[3]]);
    let result = if head == Some(FORMAT_MAGIC) {
        load_binary(path)
    } else {
        load_text(path)
    };
    result.map_err(invalid)
}

pub fn load_word_sets(dir: Option<&Path>) -> Result<WordSets, CliError> {
    match dir {
        Some(dir) => WordSets::load_dir(dir).map_err(invalid),
        None => Ok(WordSets::builtin()),
    }
}

pub fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(internal)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(internal)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(value)
        .map_err(|e| internal(anyhow!("serialization failed: {e}")))?;
    write_text(path, &(json + "\n"))
}

/// Sidecar manifest path for a single-file output.
pub fn sidecar_manifest_path(out: &Path) -> PathBuf {
    let name = out
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or("output");
    out.with_file_name(format!("{name}.manifest.json"))
}

pub fn finish_manifest(
    mut manifest: RunManifest,
    inputs: &[&Path],
    outputs: &[&Path],
    path: &Path,
) -> Result<(), CliError> {
    for input in inputs {
        manifest
            .add_input(input)
            .with_context(|| format!("cannot digest {}", input.display()))
            .map_err(internal)?;
    }
    for output in outputs {
        manifest
            .add_output(output)
            .with_context(|| format!("cannot digest {}", output.display()))
            .map_err(internal)?;
    }
    manifest
        .write(path)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(internal)
}
