//! Writing tables and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use clap::ValueEnum;
use rpzf::export::Table;
use rpzf::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything needed to reproduce an output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub version: String,
    /// Omitted from the copy embedded in JSON outputs so those stay
    /// byte-for-byte reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, params: &impl Serialize, seed: Option<u64>) -> Result<Self> {
        Ok(RunManifest {
            command: command.into(),
            params: serde_json::to_value(params).map_err(|e| Error::Io(e.to_string()))?,
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: None,
            outputs: Vec::new(),
        })
    }
}

/// RFC 3339 UTC time, taken from `SOURCE_DATE_EPOCH` when set so that
/// manifests can be reproduced exactly.
pub fn timestamp() -> Result<String> {
    let now = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(s) => {
            let secs: i64 = s.trim().parse().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("SOURCE_DATE_EPOCH {s:?} is not an integer"),
            })?;
            DateTime::<Utc>::from_timestamp(secs, 0).ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("SOURCE_DATE_EPOCH {secs} is out of range"),
            })?
        }
        Err(_) => Utc::now(),
    };
    Ok(now.to_rfc3339_opts(SecondsFormat::Secs, true))
}

/// Path of the manifest written next to `out`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn render(table: &Table, format: Format, manifest: &RunManifest) -> Result<String> {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut v = table.to_json_value();
            v["manifest"] = json!(manifest);
            let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Writes `table` to `out` (or stdout) and, for file outputs, the manifest
/// next to it as `<out>.manifest.json`.
pub fn emit(table: &Table, format: Format, out: Option<&Path>, mut manifest: RunManifest) -> Result<()> {
    let Some(out) = out else {
        let text = render(table, format, &manifest)?;
        std::io::stdout().lock().write_all(text.as_bytes())?;
        return Ok(());
    };
    let mpath = manifest_path(out);
    manifest.outputs = vec![out.display().to_string(), mpath.display().to_string()];
    fs::write(out, render(table, format, &manifest)?)?;
    manifest.timestamp = Some(timestamp()?);
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    fs::write(&mpath, text)?;
    Ok(())
}
