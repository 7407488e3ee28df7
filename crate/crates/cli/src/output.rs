//! Report emission. Every artifact — CSV table or JSON document — embeds the
//! tool version and a SHA-256 of the resolved run configuration, so identical
//! configs produce byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Canonical JSON of the resolved config plus its hash.
pub struct Meta {
    pub config_json: String,
    pub config_sha256: String,
}

impl Meta {
    pub fn new(resolved_config: &impl Serialize) -> Result<Self> {
        let config_json =
            serde_json::to_string(resolved_config).context("serializing resolved config")?;
        let digest = Sha256::digest(config_json.as_bytes());
        let config_sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        Ok(Meta {
            config_json,
            config_sha256,
        })
    }
}

fn open_sink(output: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match output {
        Some(path) => Box::new(
            std::fs::File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    })
}

/// Writes a CSV table: `#` meta comment lines, a header row, then records.
pub fn write_csv(
    output: Option<&PathBuf>,
    meta: &Meta,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let mut sink = open_sink(output.map(PathBuf::as_path))?;
    writeln!(sink, "# renyi-lab v{VERSION}")?;
    writeln!(sink, "# config_sha256={}", meta.config_sha256)?;
    writeln!(sink, "# config={}", meta.config_json)?;
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes `{"meta": …, "result": …}` as pretty JSON.
pub fn write_json(output: Option<&PathBuf>, meta: &Meta, result: &impl Serialize) -> Result<()> {
    #[derive(Serialize)]
    struct MetaBlock<'a> {
        tool: &'static str,
        version: &'static str,
        config_sha256: &'a str,
        config: serde_json::Value,
    }
    #[derive(Serialize)]
    struct Document<'a, T: Serialize> {
        meta: MetaBlock<'a>,
        result: &'a T,
    }
    let doc = Document {
        meta: MetaBlock {
            tool: "renyi-lab",
            version: VERSION,
            config_sha256: &meta.config_sha256,
            config: serde_json::from_str(&meta.config_json)?,
        },
        result,
    };
    let mut sink = open_sink(output.map(PathBuf::as_path))?;
    serde_json::to_writer_pretty(&mut sink, &doc)?;
    writeln!(sink)?;
    Ok(())
}
