//! Run manifests and the run directory.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::report::RunOutput;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the raw config bytes.
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub started: u64,
    pub finished: u64,
    pub files: Vec<String>,
    pub summary: Vec<String>,
    pub exit_status: i32,
}

pub fn config_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}

/// Writes the report files of a run, then its manifest.
pub fn write_run(dir: &Path, output: &RunOutput, manifest: &RunManifest) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, contents) in &output.files {
        write_atomic(&dir.join(name), contents.as_bytes())?;
    }
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    write_atomic(&dir.join(MANIFEST_NAME), format!("{json}\n").as_bytes())
}
