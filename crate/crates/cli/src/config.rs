//! Flat `key=value` configuration with CLI > file > default precedence.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use mdd_core::explab::parse_config;

/// Bad flags, config keys or values. Maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Keys a manifest carries that are not inputs.
const METADATA_KEYS: &[&str] = &["toolVersion", "timestamp", "command"];

#[derive(Debug, Default)]
pub struct Config {
    entries: Vec<(String, String)>,
    used: RefCell<BTreeSet<String>>,
}

impl Config {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let map = parse_config(text).map_err(|e| config_error(e.to_string()))?;
        let mut entries: Vec<(String, String)> = Vec::new();
        // manifest form: subcommand settings live under `param.`
        for (k, v) in map {
            if k.starts_with("result.") || METADATA_KEYS.contains(&k.as_str()) {
                continue;
            }
            let key = k.strip_prefix("param.").unwrap_or(&k).to_string();
            if let Some(prev) = entries.iter().find(|(e, _)| *e == key) {
                if prev.1 != v {
                    return Err(config_error(format!("key {key} given twice with different values")));
                }
                continue;
            }
            entries.push((key, v));
        }
        Ok(Config {
            entries,
            used: RefCell::new(BTreeSet::new()),
        })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_string());
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| config_error(format!("config value {key}={v} is malformed"))),
        }
    }

    /// Fails on any key no resolver asked for.
    pub fn reject_unused(&self) -> anyhow::Result<()> {
        let used = self.used.borrow();
        let unknown: Vec<&str> = self
            .entries
            .iter()
            .map(|(k, _)| k.as_str())
            .filter(|k| !used.contains(*k))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(config_error(format!("unknown config keys: {}", unknown.join(", "))))
        }
    }
}

/// CLI value, else config value, else `default`.
pub fn pick<T: FromStr>(cli: Option<T>, cfg: &Config, key: &str, default: T) -> anyhow::Result<T> {
    Ok(pick_opt(cli, cfg, key)?.unwrap_or(default))
}

pub fn pick_opt<T: FromStr>(cli: Option<T>, cfg: &Config, key: &str) -> anyhow::Result<Option<T>> {
    let from_file = cfg.get(key)?;
    Ok(cli.or(from_file))
}

/// Boolean switch: set on the command line, or `key=true` in the file.
pub fn pick_flag(cli: bool, cfg: &Config, key: &str) -> anyhow::Result<bool> {
    let from_file: Option<bool> = cfg.get(key)?;
    Ok(cli || from_file.unwrap_or(false))
}
