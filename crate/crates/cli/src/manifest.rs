use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::settings::Settings;

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: Option<u64>,
    pub config: BTreeMap<String, String>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub timings: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    /// Command-specific summary (best grid cell, fit, ...).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<serde_json::Value>,
}

pub fn manifest_path(artifact: &Path) -> PathBuf {
    sibling(artifact, "manifest.json")
}

/// `out.bin` becomes `out.bin.<suffix>`.
pub fn sibling(artifact: &Path, suffix: &str) -> PathBuf {
    let mut name = artifact.as_os_str().to_owned();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}

pub fn digest(path: &Path) -> CliResult<InputDigest> {
    let mut file = File::open(path).map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut bytes = 0u64;
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        bytes += n as u64;
    }
    Ok(InputDigest { path: path.display().to_string(), bytes, sha256: hex::encode(hasher.finalize()) })
}

/// Collects what a command touched and writes it next to the main output.
pub struct Recorder {
    command: &'static str,
    started: Instant,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
    timings: BTreeMap<String, f64>,
    warnings: Vec<String>,
    summary: Option<serde_json::Value>,
}

impl Recorder {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            started: Instant::now(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            timings: BTreeMap::new(),
            warnings: Vec::new(),
            summary: None,
        }
    }

    pub fn input(&mut self, path: &Path) -> CliResult<()> {
        self.inputs.push(digest(path)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn time(&mut self, name: &str, seconds: f64) {
        self.timings.insert(name.to_string(), seconds);
    }

    pub fn warn(&mut self, message: String) {
        eprintln!("warning: {message}");
        self.warnings.push(message);
    }

    pub fn summary(&mut self, value: serde_json::Value) {
        self.summary = Some(value);
    }

    pub fn warnings(&self) -> usize {
        self.warnings.len()
    }

    pub fn finish(mut self, settings: &Settings, main_output: &Path) -> CliResult<()> {
        for key in settings.unused() {
            self.warn(format!("config key {key:?} is not used by {}", self.command));
        }
        self.timings.insert("total_seconds".into(), self.started.elapsed().as_secs_f64());
        let config = settings.resolved().clone();
        let seed = config.get("seed").and_then(|s| s.parse().ok());
        let manifest = RunManifest {
            command: self.command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            inputs: self.inputs,
            outputs: self.outputs,
            timings: self.timings,
            warnings: self.warnings,
            summary: self.summary,
        };
        let path = manifest_path(main_output);
        let file = crate::io::create(&path)?;
        serde_json::to_writer_pretty(file, &manifest).map_err(|e| CliError::data(e.to_string()))?;
        Ok(())
    }
}
