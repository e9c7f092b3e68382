use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub const RESOLVED_CONFIG: &str = "resolved_config.toml";
pub const MANIFEST: &str = "manifest.json";

/// `git describe`-style version: the package version, plus the describe
/// string when `QCAD_GIT_DESCRIBE` was set at build time.
pub fn version_string() -> String {
    match option_env!("QCAD_GIT_DESCRIBE") {
        Some(d) if !d.is_empty() => format!("v{}-{d}", env!("CARGO_PKG_VERSION")),
        _ => format!("v{}", env!("CARGO_PKG_VERSION")),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Energies.
pub fn fmt_energy(x: f64) -> String {
    format!("{x:.12e}")
}

/// Sampled statistics.
pub fn fmt_stat(x: f64) -> String {
    format!("{x:.6e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Per-run result record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config_hash: String,
    pub version: String,
    pub wall_time_s: f64,
    pub files: Vec<FileEntry>,
}

/// Collects output files in memory and writes them together once the
/// command has succeeded.
#[derive(Debug)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl Default for OutputSet {
    fn default() -> Self {
        Self::new()
    }
}

impl OutputSet {
    pub fn new() -> Self {
        Self { files: Vec::new() }
    }

    pub fn add(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    pub fn add_json<T: Serialize>(&mut self, name: impl Into<String>, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.add(name, text);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_slice())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    /// Writes every file plus the resolved config and the manifest.
    pub fn commit(self, dir: &Path, command: &str, config: &RunConfig, wall_time_s: f64) -> Result<Manifest> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        let resolved = config.to_toml();
        let mut entries = Vec::new();
        let mut all = self.files;
        all.push((RESOLVED_CONFIG.to_string(), resolved.clone().into_bytes()));
        for (name, contents) in &all {
            let path: PathBuf = dir.join(name);
            fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
            entries.push(FileEntry { path: name.clone(), sha256: sha256_hex(contents), bytes: contents.len() });
        }
        let manifest = Manifest {
            command: command.to_string(),
            config_hash: sha256_hex(resolved.as_bytes()),
            version: version_string(),
            wall_time_s,
            files: entries,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(dir.join(MANIFEST), text).with_context(|| format!("writing {MANIFEST}"))?;
        Ok(manifest)
    }
}

/// Minimal CSV builder: a fixed header and pre-formatted cells.
#[derive(Debug)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text, columns: header.len() }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "CSV row width mismatch");
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}
