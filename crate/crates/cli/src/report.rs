//! Run reports and CSV tables.

use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL_VERSION: &str = concat!("pucci-lab ", env!("CARGO_PKG_VERSION"));

/// JSON has no NaN or infinities; those are written as strings.
mod float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&v.to_string())
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// One pass/fail entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "float")]
    pub value: f64,
    /// `<=`, `>=`, `<` or `>`.
    pub relation: String,
    #[serde(with = "float")]
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: &str, threshold: f64) -> Self {
        let pass = match relation {
            "<=" => value <= threshold,
            ">=" => value >= threshold,
            "<" => value < threshold,
            ">" => value > threshold,
            _ => false,
        };
        Self {
            name: name.into(),
            value,
            relation: relation.to_string(),
            threshold,
            pass,
        }
    }

    /// A boolean outcome recorded as `value = 1` (true) or `0`.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, ">=", 1.0)
    }
}

/// Wall-clock data; the only part of a report that changes between re-runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Seconds since the Unix epoch at start.
    pub started_unix: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub tool_version: String,
    /// Effective configuration after defaults and overrides.
    pub parameters: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub timing: Timing,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(format!("{}.report.json", self.command));
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// A CSV file produced by a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, header: &[&str]) -> Self {
        Self {
            file: file.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|v| v.to_string()).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(&self.file);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn report_round_trips() {
        let r = RunReport {
            command: "radial".into(),
            tool_version: TOOL_VERSION.into(),
            parameters: json!({"a": 1.0, "dims": [2, 3]}),
            results: json!({"error": 1.234_567_890_123e-7}),
            checks: vec![Check::new("error", 1.2e-7, "<=", 1e-5), Check::flag("done", false)],
            timing: Timing {
                started_unix: 1.0,
                wall_time_s: 0.25,
            },
        };
        let back: RunReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(!r.all_pass());
    }

    #[test]
    fn non_finite_values_round_trip() {
        let c = Check::new("gap", f64::INFINITY, "<=", 1.0);
        let back: Check = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let n = Check::new("gap", f64::NAN, "<=", 1.0);
        let back: Check = serde_json::from_str(&serde_json::to_string(&n).unwrap()).unwrap();
        assert!(back.value.is_nan() && !back.pass);
    }

    #[test]
    fn relations() {
        assert!(Check::new("x", 1.0, "<=", 1.0).pass);
        assert!(!Check::new("x", 1.0, "<", 1.0).pass);
        assert!(Check::new("x", 2.0, ">", 1.0).pass);
        assert!(!Check::new("x", f64::NAN, ">=", 0.0).pass);
        assert!(!Check::new("x", 0.0, "==", 0.0).pass);
    }
}
