//! Per-stage manifest: input checksums, config hash, output checksums, and
//! counters. A stage whose manifest matches its current inputs and config is
//! up to date and skipped unless forced.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Counters;
use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub config_hash: String,
    /// Input path -> content checksum.
    pub inputs: BTreeMap<String, String>,
    /// Output file name -> content checksum, recorded under the config hash
    /// that produced it.
    pub outputs: BTreeMap<String, String>,
    pub counters: Counters,
}

pub fn file_sha256(path: &Path) -> std::io::Result<String> {
    let mut file = std::fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

impl Manifest {
    pub fn load(stage_dir: &Path) -> Option<Manifest> {
        let text = std::fs::read_to_string(stage_dir.join(MANIFEST_FILE)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store(&self, stage_dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(stage_dir)?;
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(stage_dir.join(MANIFEST_FILE), text)?;
        Ok(())
    }

    /// Up to date when the config hash and every recorded input checksum
    /// match and every recorded output still exists with its checksum.
    pub fn is_fresh(
        &self,
        stage_dir: &Path,
        config_hash: &str,
        inputs: &BTreeMap<String, String>,
    ) -> bool {
        if self.config_hash != config_hash || &self.inputs != inputs {
            return false;
        }
        self.outputs.iter().all(|(name, checksum)| {
            file_sha256(&stage_dir.join(name)).is_ok_and(|current| current == *checksum)
        })
    }
}

/// Checksums a set of input paths, failing with a missing-input error (exit
/// code 2) when one does not exist.
pub fn checksum_inputs(
    paths: &[(&str, &Path)],
    hint: &str,
) -> Result<BTreeMap<String, String>, CliError> {
    let mut inputs = BTreeMap::new();
    for (_, path) in paths {
        if !path.exists() {
            return Err(CliError::missing(*path, hint.to_string()));
        }
        inputs.insert(
            path.to_string_lossy().into_owned(),
            file_sha256(path).map_err(CliError::from)?,
        );
    }
    Ok(inputs)
}
