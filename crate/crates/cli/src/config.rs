//! Plain-text `key = value` configuration files.
//!
//! Precedence is built-in defaults, then the config file, then command
//! line flags. Keys use the flag spellings without the leading dashes;
//! `#` starts a comment.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

const KNOWN_KEYS: &[&str] = &[
    "algo",
    "algos",
    "fn",
    "fns",
    "dim",
    "particles",
    "runs",
    "seed",
    "max-iters",
    "stop-threshold",
    "workers",
    "gamma",
    "beta",
    "tau",
    "prior",
    "cov-mode",
    "bb-scale",
    "kernel",
    "kernel-mu",
    "format",
    "w",
    "phi",
    "eta",
    "chi-as-inertia",
    "beta-g",
    "beta-b",
    "window",
    "epsilon",
    "transform",
    "noise-sigma",
    "record-trace",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: HashMap<String, String>,
    /// Original file text, copied verbatim into suite output directories.
    pub raw: String,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        Self::parse(&raw)
    }

    pub fn parse(raw: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (lineno, line) in raw.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected `key = value`", lineno + 1))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                bail!("config line {}: unknown key `{key}`", lineno + 1);
            }
            values.insert(key.to_owned(), value.trim().to_owned());
        }
        Ok(Self {
            values,
            raw: raw.to_owned(),
        })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn parse_value<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow!("config key `{key}`: {e}")),
        }
    }
}
