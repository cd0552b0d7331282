//! Run manifests: JSON records of every input identity and parameter that
//! determined an artifact, so downstream stages can refuse mismatched
//! inputs. Timing measurements never go in a manifest; manifests are
//! byte-reproducible from (seed, configs).

use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::sim::SimParams;

/// Hex SHA-256 of a file's bytes.
pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(hex_string(&hasher.finalize()))
}

/// Hex SHA-256 of a string (for in-memory generated specs).
pub fn sha256_str(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Input(format!("manifest serialization failed: {e}")))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| {
        Error::Manifest(format!("{} is not a valid manifest: {e}", path.display()))
    })
}

/// Manifest written alongside a generated sensor log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogManifest {
    pub kind: String,
    pub params: SimParams,
    pub steps: u64,
    pub channel_names: Vec<String>,
    pub log_sha256: String,
}

/// Manifest written by an online learning run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LearnManifest {
    pub kind: String,
    pub log_sha256: String,
    pub tiling_sha256: String,
    pub spec_sha256: String,
    pub steps: u64,
    pub n: usize,
    pub active_per_step: usize,
    pub spec_count: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub discounts: Vec<f64>,
    /// Seeded draw of feature-component target indices, recorded for
    /// reproducibility of the generated bank. Empty when specs were loaded
    /// from a file.
    pub feature_target_indices: Vec<usize>,
    pub feature_seed: u64,
    pub probes: Vec<usize>,
    /// (probe id, target+discount signature). Probes with equal signatures
    /// have identical ideal returns on the same log.
    pub probe_signatures: Vec<(usize, String)>,
    pub workers: usize,
}

/// Manifest written by an offline solve run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveManifest {
    pub kind: String,
    pub log_sha256: String,
    pub tiling_sha256: String,
    pub spec_sha256: String,
    pub steps: u64,
    pub n: usize,
    pub ridge: f64,
    pub truncation_eps: f64,
    pub probes: Vec<usize>,
    /// (probe id, target+discount signature), as in [`LearnManifest`].
    pub probe_signatures: Vec<(usize, String)>,
    /// (prediction id, residual RMSE of the offline optimum).
    pub residuals: Vec<(usize, f64)>,
    /// (prediction id, truncation horizon of its return series).
    pub horizons: Vec<(usize, usize)>,
}

/// Checks that two stages ran against the same log, tiling config, and spec
/// file.
pub fn check_chain(
    what_a: &str,
    a: (&str, &str, &str),
    what_b: &str,
    b: (&str, &str, &str),
) -> Result<()> {
    for ((name, x), y) in [("log", a.0), ("tiling config", a.1), ("spec file", a.2)]
        .iter()
        .zip([b.0, b.1, b.2])
    {
        if *x != y {
            return Err(Error::Manifest(format!(
                "{what_a} and {what_b} disagree on {name} identity ({x} vs {y})"
            )));
        }
    }
    Ok(())
}
