//! Deterministic CSV and JSON artifacts.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::CliError;

pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else {
        "nan".to_string()
    }
}

/// CSV table preceded by `#` lines listing the tool version and every resolved parameter.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| num(*v)).collect());
    }

    pub fn render(&self, kind: &str, params: &BTreeMap<String, String>) -> String {
        let mut out = format!("# phaseclass {} {kind}\n", env!("CARGO_PKG_VERSION"));
        let kv: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("# {}\n", kv.join(" ")));
        out.push_str(&self.header.join(","));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Results keyed by name, each paired with the formula it evaluates.
#[derive(Debug, Clone, Default)]
pub struct Summary {
    results: Map<String, Value>,
    formulas: Map<String, Value>,
}

impl Summary {
    pub fn put(&mut self, key: &str, value: impl Serialize, formula: &str) {
        self.results.insert(key.to_string(), serde_json::to_value(value).expect("serializable result"));
        self.formulas.insert(key.to_string(), Value::String(formula.to_string()));
    }

    pub fn render(&self, kind: &str, params: &BTreeMap<String, String>, conv: [f64; 3]) -> Value {
        json!({
            "tool": "phaseclass",
            "version": env!("CARGO_PKG_VERSION"),
            "kind": kind,
            "conventions": {
                "hbar": conv[0],
                "sigma2": conv[1],
                "mass": conv[2],
                "measure": "dq dp/(2 pi hbar)",
                "coherent_covariance": "diag(2 hbar sigma2, hbar/(8 sigma2))",
            },
            "parameters": params,
            "results": Value::Object(self.results.clone()),
            "formulas": Value::Object(self.formulas.clone()),
        })
    }
}

pub struct Artifacts {
    pub kind: &'static str,
    pub params: BTreeMap<String, String>,
    pub conv: [f64; 3],
    pub csv: Csv,
    pub summary: Summary,
}

impl Artifacts {
    pub fn csv_text(&self) -> String {
        self.csv.render(self.kind, &self.params)
    }

    pub fn json_text(&self) -> String {
        let v = self.summary.render(self.kind, &self.params, self.conv);
        let mut s = serde_json::to_string_pretty(&v).expect("json renders");
        s.push('\n');
        s
    }

    /// Writes `<kind>.csv` and `<kind>.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let io = |path: &Path, e: std::io::Error| CliError::Io { path: path.display().to_string(), source: e };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let csv = dir.join(format!("{}.csv", self.kind));
        std::fs::write(&csv, self.csv_text()).map_err(|e| io(&csv, e))?;
        let js = dir.join(format!("{}.json", self.kind));
        std::fs::write(&js, self.json_text()).map_err(|e| io(&js, e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_stable() {
        let mut c = Csv::new(&["a", "b"]);
        c.push_nums(&[1.0, f64::NAN]);
        let mut p = BTreeMap::new();
        p.insert("hbar".to_string(), "1".to_string());
        let text = c.render("squeeze", &p);
        assert!(text.ends_with("a,b\n1.000000000000e0,nan\n"));
        assert!(text.contains("# hbar=1\n"));
    }

    #[test]
    fn every_result_has_a_formula() {
        let mut s = Summary::default();
        s.put("I", 1.0, "I = 1 + ln cosh r");
        let v = s.render("squeeze", &BTreeMap::new(), [1.0, 0.25, 1.0]);
        assert_eq!(v["formulas"]["I"], "I = 1 + ln cosh r");
        assert_eq!(v["conventions"]["sigma2"], 0.25);
    }
}
