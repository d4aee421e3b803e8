//! Run manifest written next to every output: the command, the config as used, versions and
//! the seed.

use std::path::Path;

use serde::Serialize;

use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct Versions {
    pub dualwalk: &'static str,
    pub tool: String,
    pub parallel: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub versions: Versions,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub summary: serde_json::Value,
}

impl RunManifest {
    pub fn new<C: Serialize>(command: &str, config: &C, seed: u64, tool_version: &str) -> Result<Self> {
        Ok(Self {
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            seed,
            versions: Versions {
                dualwalk: env!("CARGO_PKG_VERSION"),
                tool: tool_version.to_string(),
                parallel: cfg!(feature = "parallel"),
            },
            outputs: Vec::new(),
            summary: serde_json::Value::Null,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let f = std::fs::File::create(dir.join("manifest.json"))?;
        serde_json::to_writer_pretty(f, self)?;
        Ok(())
    }
}
