//! Flat key/value experiment configs.
//!
//! One `key = value` pair per line; `#` starts a comment; keys are
//! namespaced with dots (`game.w`, `bound.mu`). The format is plain text so
//! pinned case-study configs diff cleanly.

use anyhow::{anyhow, bail, Context, Result};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Default)]
pub struct Config {
    map: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{line}`", lineno + 1))?;
            let key = key.trim().to_string();
            if key.is_empty() {
                bail!("line {}: empty key", lineno + 1);
            }
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("line {}: duplicate key `{key}`", lineno + 1);
            }
        }
        Ok(Config { map })
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.map.insert(key.to_string(), value.to_string());
    }

    pub fn opt(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        self.opt(key).ok_or_else(|| anyhow!("missing key `{key}`"))
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.opt(key).unwrap_or(default)
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.str(key)?
            .parse()
            .map_err(|e| anyhow!("key `{key}`: not a number ({e})"))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.opt(key) {
            None => Ok(default),
            Some(_) => self.f64(key),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.opt(key) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|e| anyhow!("key `{key}`: not a count ({e})")),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.opt(key) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|e| anyhow!("key `{key}`: not an integer ({e})")),
        }
    }

    pub fn vec_f64(&self, key: &str) -> Result<Vec<f64>> {
        self.str(key)?
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|e| anyhow!("key `{key}`: bad entry `{}` ({e})", s.trim()))
            })
            .collect()
    }
}
