//! `key = value` configuration files. Sections (`[name]`) are accepted as
//! visual grouping and otherwise ignored; keys are global. Command-line
//! flags override file values.

use std::collections::HashMap;

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: HashMap<String, String>,
    /// Keys the commands actually looked up; the rest get a warning.
    known: Vec<String>,
}

/// Keys any command may consume.
const KNOWN_KEYS: [&str; 20] = [
    "eos", "gamma", "K", "A", "B", "mu", "mu-min", "mu-max", "points", "cells", "N", "nu1",
    "nu2", "tol", "tau-grid", "perturb", "tmax", "dt", "format", "rho",
];

impl FileConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, String> {
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                continue; // section header, grouping only
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "{origin}:{}: expected `key = value`, got `{raw}`",
                    lineno + 1
                ));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self {
            values,
            known: KNOWN_KEYS.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn load(path: &str) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {path}: {e}"))?;
        Self::parse(&text, path)
    }

    /// Warnings for keys no command understands (not fatal).
    pub fn unknown_key_warnings(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .values
            .keys()
            .filter(|k| !self.known.iter().any(|n| n == *k))
            .map(|k| format!("warning: unknown config key `{k}`"))
            .collect();
        out.sort();
        out
    }

    pub fn str_val(&self, key: &str) -> Option<String> {
        self.values.get(key).cloned()
    }

    pub fn f64_val(&self, key: &str) -> Result<Option<f64>, String> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| format!("config key `{key}`: `{v}` is not a number")),
        }
    }

    pub fn usize_val(&self, key: &str) -> Result<Option<usize>, String> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| format!("config key `{key}`: `{v}` is not an integer")),
        }
    }
}
