//! Run manifests: the config snapshot plus a SHA-256 digest of every
//! emitted file.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{HarnessError, RunConfig};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Path relative to the output directory.
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact: String,
    pub version: String,
    pub config: RunConfig,
    /// RFC 3339 wall-clock times; not part of any digest.
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn load(dir: &Path) -> Result<Self, HarnessError> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(HarnessError::io(&path))?;
        serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    /// Files under `dir` whose current digest differs from the recorded one.
    pub fn mismatches(&self, dir: &Path) -> Result<Vec<String>, HarnessError> {
        let mut bad = Vec::new();
        for out in &self.outputs {
            if sha256_file(&dir.join(&out.file))? != out.sha256 {
                bad.push(out.file.clone());
            }
        }
        Ok(bad)
    }
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String, HarnessError> {
    let bytes = fs::read(path).map_err(HarnessError::io(path))?;
    Ok(sha256_bytes(&bytes))
}
