//! `key = value` configuration files whose keys mirror the long command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    /// Blank lines and lines starting with `#` are skipped; `-` and `_` in keys are interchangeable.
    pub fn parse(text: &str, allowed: &[&str]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (number, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected key = value, got {line:?}", number + 1);
            };
            let key = key.trim().replace('-', "_");
            if !allowed.contains(&key.as_str()) {
                bail!("line {}: unknown key {key:?}", number + 1);
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("line {}: key {key:?} given twice", number + 1);
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path, allowed: &[&str]) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
        Self::parse(&text, allowed)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// The flag wins over the file.
    pub fn resolve(&self, key: &str, flag: Option<&str>) -> Option<String> {
        flag.map(str::to_string).or_else(|| self.get(key).map(str::to_string))
    }
}
