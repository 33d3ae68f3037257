//! Option resolution: command-line flag > environment variable > config
//! file > built-in default.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::run::CliError;

pub const ENV_SEED: &str = "PATHSUM_SEED";
pub const ENV_OUT_DIR: &str = "PATHSUM_OUT_DIR";

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_THREADS: usize = 1;

/// Optional values supplied by a JSON config file; any flag may appear.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub trials: Option<u64>,
    pub paths: Option<usize>,
    pub wavelength: Option<f64>,
    pub side: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub format: Option<String>,
    pub out: Option<String>,
    pub live_fraction: Option<f64>,
    pub grid: Option<usize>,
    pub gamma_left: Option<f64>,
    pub gamma_right: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::Usage(format!("cannot read config {}: {e}", p.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::Usage(format!("invalid config {}: {e}", p.display()))
                })
            }
        }
    }
}

/// Seed resolution: flag, then PATHSUM_SEED, then config file, then default.
pub fn resolve_seed(flag: Option<u64>, file: &FileConfig) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(text) = std::env::var(ENV_SEED) {
        return text
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("{ENV_SEED} must be a u64, got {text:?}")));
    }
    Ok(file.seed.unwrap_or(DEFAULT_SEED))
}

/// Output-path resolution; relative paths land under PATHSUM_OUT_DIR when set.
pub fn resolve_out(flag: Option<&str>, file: &FileConfig) -> Option<PathBuf> {
    let raw = flag
        .map(str::to_owned)
        .or_else(|| file.out.clone())?;
    if raw == "-" {
        return None;
    }
    let path = PathBuf::from(&raw);
    match std::env::var(ENV_OUT_DIR) {
        Ok(dir) if path.is_relative() => Some(PathBuf::from(dir).join(path)),
        _ => Some(path),
    }
}
