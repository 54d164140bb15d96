//! Flat `key = value` config files with `[section]` headers, and layered parameter lookup.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::CliError;

/// Parsed config file: section name → key → raw value. Keys before any header land in `""`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IniFile {
    pub sections: BTreeMap<String, BTreeMap<String, String>>,
}

fn normalise_key(k: &str) -> String {
    k.trim().to_ascii_lowercase().replace('-', "_")
}

pub fn parse_ini(text: &str) -> Result<IniFile, CliError> {
    let mut out = IniFile::default();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| CliError::Config(format!("line {}: unterminated section header", lineno + 1)))?;
            section = name.trim().to_ascii_lowercase();
            out.sections.entry(section.clone()).or_default();
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = normalise_key(k);
        if key.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key", lineno + 1)));
        }
        let entry = out.sections.entry(section.clone()).or_default();
        if entry.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("line {}: duplicate key '{key}' in [{section}]", lineno + 1)));
        }
    }
    Ok(out)
}

/// `key=value` from `--set`.
pub fn parse_assignment(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    Ok((normalise_key(k), v.trim().to_string()))
}

/// Layered lookup: explicit flags, then `--set`, then the scenario's config section, then
/// `[conventions]`. Every read is recorded so outputs can print the resolved parameters, and
/// parse or range failures are collected rather than raised.
pub struct Params {
    layers: Vec<(String, BTreeMap<String, String>)>,
    resolved: RefCell<BTreeMap<String, String>>,
    violations: RefCell<Vec<String>>,
}

impl Params {
    pub fn new(kind: &str, ini: &IniFile, sets: &[(String, String)], flags: Vec<(&'static str, String)>) -> Self {
        let mut layers = Vec::new();
        layers.push(("flag".to_string(), flags.into_iter().map(|(k, v)| (k.to_string(), v)).collect()));
        layers.push(("--set".to_string(), sets.iter().cloned().collect()));
        for sec in [kind, "conventions", ""] {
            if let Some(m) = ini.sections.get(sec) {
                layers.push((format!("[{sec}]"), m.clone()));
            }
        }
        Self { layers, resolved: RefCell::new(BTreeMap::new()), violations: RefCell::new(Vec::new()) }
    }

    fn raw(&self, key: &str) -> Option<String> {
        self.layers.iter().find_map(|(_, m)| m.get(key).cloned())
    }

    fn record(&self, key: &str, value: String) {
        self.resolved.borrow_mut().insert(key.to_string(), value);
    }

    pub fn violate(&self, msg: impl Into<String>) {
        self.violations.borrow_mut().push(msg.into());
    }

    pub fn string(&self, key: &str, default: &str) -> String {
        let v = self.raw(key).unwrap_or_else(|| default.to_string());
        self.record(key, v.clone());
        v
    }

    pub fn opt_string(&self, key: &str) -> Option<String> {
        let v = self.raw(key);
        if let Some(s) = &v {
            self.record(key, s.clone());
        }
        v
    }

    fn parse_f64(&self, key: &str, s: &str) -> Option<f64> {
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                self.violate(format!("{key}: '{s}' is not a finite number"));
                None
            }
        }
    }

    pub fn f64(&self, key: &str, default: f64) -> f64 {
        match self.raw(key) {
            Some(s) => {
                let v = self.parse_f64(key, &s).unwrap_or(default);
                self.record(key, s);
                v
            }
            None => {
                self.record(key, format!("{default}"));
                default
            }
        }
    }

    pub fn opt_f64(&self, key: &str) -> Option<f64> {
        let s = self.raw(key)?;
        self.record(key, s.clone());
        self.parse_f64(key, &s)
    }

    pub fn usize(&self, key: &str, default: usize) -> usize {
        match self.raw(key) {
            Some(s) => {
                self.record(key, s.clone());
                s.parse::<usize>().unwrap_or_else(|_| {
                    self.violate(format!("{key}: '{s}' is not a non-negative integer"));
                    default
                })
            }
            None => {
                self.record(key, default.to_string());
                default
            }
        }
    }

    pub fn f64_list(&self, key: &str, default: &[f64]) -> Vec<f64> {
        match self.raw(key) {
            Some(s) => {
                self.record(key, s.clone());
                s.split(',').filter(|t| !t.trim().is_empty()).filter_map(|t| self.parse_f64(key, t.trim())).collect()
            }
            None => {
                self.record(key, default.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
                default.to_vec()
            }
        }
    }

    pub fn positive(&self, key: &str, v: f64) {
        if !(v > 0.0) {
            self.violate(format!("{key} must be > 0, got {v}"));
        }
    }

    pub fn non_negative(&self, key: &str, v: f64) {
        if !(v >= 0.0) {
            self.violate(format!("{key} must be >= 0, got {v}"));
        }
    }

    pub fn one_of(&self, key: &str, v: &str, allowed: &[&str]) {
        if !allowed.contains(&v) {
            self.violate(format!("{key} must be one of {}, got '{v}'", allowed.join("|")));
        }
    }

    /// Resolved parameters, sorted by key.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        self.resolved.borrow().clone()
    }

    /// Collected violations, and warnings for supplied keys that no reader consumed.
    pub fn finish(&self) -> Check {
        let used: BTreeSet<String> = self.resolved.borrow().keys().cloned().collect();
        let mut warnings = Vec::new();
        for (origin, layer) in &self.layers {
            if origin == "[conventions]" || origin == "[]" {
                continue;
            }
            for k in layer.keys() {
                if !used.contains(k) {
                    warnings.push(format!("unused parameter '{k}' (from {origin})"));
                }
            }
        }
        Check { violations: self.violations.borrow().clone(), warnings }
    }
}

/// Outcome of parameter validation.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct Check {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}
