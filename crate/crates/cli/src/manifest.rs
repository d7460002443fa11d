//! Run manifests: a JSON record written next to every output file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

pub const TOOL: &str = "rnlm";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Arguments after the program name; `rnlm replay` re-runs exactly these.
    pub argv: Vec<String>,
    pub command: String,
    pub params: Map<String, Value>,
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    pub generator: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(argv: &[String], command: &str) -> Self {
        RunManifest {
            tool: TOOL.into(),
            version: VERSION.into(),
            argv: argv.to_vec(),
            command: command.into(),
            params: Map::new(),
            sigma: None,
            seed: None,
            generator: rnlm::GENERATOR_ID.into(),
            outputs: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    pub fn output(mut self, path: &Path) -> Self {
        self.outputs.push(path.display().to_string());
        self
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::format(path, format!("invalid manifest at line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    /// Writes `<primary>.manifest.json` and returns its path.
    pub fn write_next_to(&self, primary: &Path) -> Result<PathBuf> {
        let path = manifest_path(primary);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

pub fn manifest_path(primary: &Path) -> PathBuf {
    let mut name = primary.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
