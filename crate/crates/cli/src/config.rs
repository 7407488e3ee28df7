//! Config-file handling. A TOML or JSON file supplies defaults; command-line
//! flags override field by field. Every report embeds the resolved values.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// Optional defaults loadable from a file. Field names match the long flags.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub n: Option<u32>,
    pub mode: Option<String>,
    pub truncation: Option<u64>,
    pub nodes: Option<usize>,
    pub quad_points: Option<usize>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub samples: Option<u64>,
    pub paths: Option<u64>,
    pub steps: Option<usize>,
    pub x_grid: Option<String>,
    pub density: Option<String>,
    /// Route-mismatch fault threshold for `gk`, in standard errors.
    pub route_sigmas: Option<f64>,
    pub output: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let parsed = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text)
                .with_context(|| format!("invalid JSON config {}", path.display()))?,
            Some("toml") | None => toml::from_str(&text)
                .with_context(|| format!("invalid TOML config {}", path.display()))?,
            Some(other) => bail!("unsupported config extension {other:?} (use .toml or .json)"),
        };
        Ok(parsed)
    }
}

/// flag value > config value > built-in default.
pub fn resolve<T: Clone>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

pub fn resolve_opt<T: Clone>(flag: Option<T>, config: Option<T>) -> Option<T> {
    flag.or(config)
}

/// Parses "start:end:count" into an inclusive evenly spaced grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("grid spec must be start:end:count, got {spec:?}");
    }
    let start: f64 = parts[0].parse().context("grid start")?;
    let end: f64 = parts[1].parse().context("grid end")?;
    let count: usize = parts[2].parse().context("grid count")?;
    if count == 0 || end < start {
        bail!("grid spec must have count ≥ 1 and end ≥ start");
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (end - start) / (count - 1) as f64;
    Ok((0..count).map(|k| start + step * k as f64).collect())
}
