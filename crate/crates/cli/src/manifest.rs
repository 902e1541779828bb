use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct Artifact {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Record of one run, written to `manifest.json` next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: serde_json::Value,
    pub threads: usize,
    pub wall_clock_secs: f64,
    pub artifacts: Vec<Artifact>,
}

/// Collects written files and emits the manifest.
pub struct RunWriter {
    dir: PathBuf,
    command: String,
    started: Instant,
    artifacts: Vec<Artifact>,
}

impl RunWriter {
    pub fn new(dir: &Path, command: &str) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(RunWriter {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            started: Instant::now(),
            artifacts: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        std::fs::write(self.dir.join(name), contents)?;
        let digest = Sha256::digest(contents.as_bytes());
        self.artifacts.push(Artifact {
            file: name.to_string(),
            bytes: contents.len(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        });
        Ok(())
    }

    pub fn finish(self, config: serde_json::Value) -> Result<PathBuf, CliError> {
        let m = RunManifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            threads: rayon::current_num_threads(),
            wall_clock_secs: self.started.elapsed().as_secs_f64(),
            artifacts: self.artifacts,
        };
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&m).expect("manifest serializes"))?;
        Ok(path)
    }
}
