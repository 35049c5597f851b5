use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Bumped whenever an artifact layout changes.
pub const SCHEMA_VERSION: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: String,
    pub config_sha256: String,
    pub base_seed: u64,
    pub seeds: Vec<u64>,
    pub status: String,
    /// File name to content hash.
    pub artifacts: BTreeMap<String, String>,
}

/// Collects artifacts written into one output directory.
pub struct ArtifactWriter {
    dir: PathBuf,
    artifacts: BTreeMap<String, String>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            artifacts: BTreeMap::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        std::fs::write(self.dir.join(name), bytes)?;
        self.artifacts.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes `manifest.json` and returns its path.
    pub fn finish(self, command: &str, resolved: &str, base_seed: u64, seeds: Vec<u64>, status: &str) -> Result<PathBuf, CliError> {
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config_sha256: sha256_hex(resolved.as_bytes()),
            base_seed,
            seeds,
            status: status.to_string(),
            artifacts: self.artifacts,
        };
        let path = self.dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Config(e.to_string()))?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}
