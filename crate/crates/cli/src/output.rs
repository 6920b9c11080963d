use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use detta::pipeline::RunConfig;
use detta::{Error, Result};
use serde::Serialize;

pub fn float(x: f64) -> String {
    format!("{x:.6}")
}

fn io(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Data(format!("{}: {e}", path.display()))
}

pub fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| io(&path, e))?;
    Ok(path)
}

pub fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
    w.write_record(header).map_err(|e| io(&path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| io(&path, e))?;
    }
    w.flush().map_err(|e| io(&path, e))?;
    Ok(path)
}

/// Everything needed to reproduce a command's outputs.
#[derive(Debug, Serialize)]
pub struct Provenance {
    pub command: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunConfig>,
}

impl Provenance {
    pub fn new(command: &str, seed: u64) -> Self {
        Provenance {
            command: command.to_string(),
            seed,
            scenario: None,
            preset: None,
            spec: None,
            parameters: BTreeMap::new(),
            run: None,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let text = toml::to_string(self).map_err(|e| Error::Config(format!("provenance: {e}")))?;
        write_text(dir, "config.toml", &text)
    }
}
