//! Layered configuration: command-line flag, then config file, then values
//! inherited from an upstream manifest, then the built-in default.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// Comma-separated list value.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<T>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

impl<T: Display> Display for List<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub trait Setting: FromStr + Display {}

impl<T: FromStr + Display> Setting for T {}

#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    inherited: BTreeMap<String, String>,
    used: BTreeSet<String>,
    resolved: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_flat(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value, got {raw:?}", n + 1)))?;
        let key = normalize(key);
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::usage(format!("config line {}: duplicate key {key:?}", n + 1)));
        }
    }
    Ok(map)
}

/// The `config` table of a run manifest.
fn manifest_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::usage(format!("bad manifest: {e}")))?;
    let table = value.get("config").and_then(|c| c.as_object()).ok_or_else(|| CliError::usage("manifest has no config table"))?;
    Ok(table.iter().filter_map(|(k, v)| v.as_str().map(|s| (k.clone(), s.to_string()))).collect())
}

impl Settings {
    /// Reads a flat config file, or the `config` table of a JSON manifest.
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let mut settings = Settings::default();
        if let Some(path) = path {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))?;
            settings.file = if text.trim_start().starts_with('{') { manifest_config(&text)? } else { parse_flat(&text)? };
        }
        Ok(settings)
    }

    /// Takes `keys` from the manifest next to `artifact`, when one exists.
    pub fn inherit(&mut self, artifact: &Path, keys: &[&str]) -> CliResult<()> {
        let path = crate::manifest::manifest_path(artifact);
        let Ok(text) = std::fs::read_to_string(&path) else {
            return Ok(());
        };
        let config = manifest_config(&text)?;
        for key in keys {
            if let Some(v) = config.get(*key) {
                self.inherited.insert(key.to_string(), v.clone());
            }
        }
        Ok(())
    }

    fn layered<T: Setting>(&mut self, key: &str, cli: Option<T>) -> CliResult<Option<T>>
    where
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        if cli.is_some() {
            return Ok(cli);
        }
        let text = self.file.get(key).or_else(|| self.inherited.get(key));
        match text {
            Some(text) => text.parse::<T>().map(Some).map_err(|e| CliError::usage(format!("config key {key}: {e}"))),
            None => Ok(None),
        }
    }

    pub fn pick<T: Setting>(&mut self, key: &str, cli: Option<T>, default: T) -> CliResult<T>
    where
        T::Err: Display,
    {
        let value = self.layered(key, cli)?.unwrap_or(default);
        self.resolved.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    pub fn pick_opt<T: Setting>(&mut self, key: &str, cli: Option<T>) -> CliResult<Option<T>>
    where
        T::Err: Display,
    {
        let value = self.layered(key, cli)?;
        if let Some(v) = &value {
            self.resolved.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    pub fn require<T: Setting>(&mut self, key: &str, cli: Option<T>) -> CliResult<T>
    where
        T::Err: Display,
    {
        self.pick_opt(key, cli)?
            .ok_or_else(|| CliError::usage(format!("missing --{} (or `{key}` in the config file)", key.replace('_', "-"))))
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }

    /// Config-file keys this command never looked at.
    pub fn unused(&self) -> Vec<String> {
        self.file.keys().filter(|k| !self.used.contains(*k)).cloned().collect()
    }
}
