//! JSON record of a finished run.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{parse_config_str, Command, RunConfig};
use crate::Result;

pub const FILE_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub subcommand: String,
    /// Every resolved key, as written in a configuration file.
    pub config: BTreeMap<String, String>,
    pub status: String,
    pub error: Option<String>,
    pub exit_code: i32,
    pub duration_seconds: f64,
    pub files: Vec<FileEntry>,
    pub convergence: BTreeMap<String, serde_json::Value>,
}

impl RunManifest {
    pub fn new(cfg: &RunConfig) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: cfg.command.name().to_string(),
            config: cfg.echo().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            status: "running".into(),
            error: None,
            exit_code: 0,
            duration_seconds: 0.0,
            files: Vec::new(),
            convergence: BTreeMap::new(),
        }
    }

    /// The echoed configuration as `key=value` text.
    pub fn config_text(&self) -> String {
        self.config.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Re-parse the echoed configuration.
    pub fn config(&self) -> Result<RunConfig> {
        parse_config_str(self.subcommand.parse::<Command>()?, &self.config_text(), &[])
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::from)?;
        std::fs::write(dir.join(FILE_NAME), text + "\n")?;
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(dir.join(FILE_NAME))?;
        Ok(serde_json::from_str(&text).map_err(std::io::Error::from)?)
    }
}
