//! Aggregates earlier run reports into one summary table.

use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{typed, Outcome};
use crate::report::{Check, RunReport, Table};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// Report files to read; when empty, every `*.report.json` in the
    /// output directory except this command's own.
    pub inputs: Vec<PathBuf>,
}

fn discover(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    if dir.is_dir() {
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
            if name.ends_with(".report.json") && name != "report.report.json" {
                found.push(path);
            }
        }
    }
    found.sort();
    Ok(found)
}

pub fn run(raw: &Value, out_dir: &Path) -> Result<(Value, Outcome)> {
    let (cfg, effective): (ReportConfig, Value) = typed(raw)?;
    let paths = if cfg.inputs.is_empty() {
        discover(out_dir)?
    } else {
        cfg.inputs.clone()
    };
    if paths.is_empty() {
        bail!("no run reports found in {}", out_dir.display());
    }
    let mut out = Outcome::default();
    let mut table = Table::new(
        "summary.csv",
        &["command", "check", "value", "relation", "threshold", "pass"],
    );
    let mut runs = Vec::new();
    for path in &paths {
        let r = RunReport::read(path)?;
        for c in &r.checks {
            table.push(vec![
                r.command.clone(),
                c.name.clone(),
                c.value.to_string(),
                c.relation.clone(),
                c.threshold.to_string(),
                c.pass.to_string(),
            ]);
        }
        let passed = r.checks.iter().filter(|c| c.pass).count();
        out.checks.push(Check::flag(format!("{} all checks pass", r.command), r.all_pass()));
        runs.push(json!({
            "command": r.command,
            "tool_version": r.tool_version,
            "checks": r.checks.len(),
            "passed": passed,
        }));
    }
    out.results = json!({ "runs": runs });
    out.tables.push(table);
    Ok((effective, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Timing;

    fn sample(command: &str, pass: bool) -> RunReport {
        RunReport {
            command: command.into(),
            tool_version: "test".into(),
            parameters: json!({}),
            results: json!({}),
            checks: vec![Check::flag("ok", pass)],
            timing: Timing {
                started_unix: 0.0,
                wall_time_s: 0.0,
            },
        }
    }

    #[test]
    fn aggregates_directory() {
        let dir = tempfile::tempdir().unwrap();
        sample("radial", true).write(dir.path()).unwrap();
        sample("eigen", false).write(dir.path()).unwrap();
        let (_, out) = run(&json!({}), dir.path()).unwrap();
        assert_eq!(out.checks.len(), 2);
        // Sorted by file name: eigen before radial.
        assert!(!out.checks[0].pass && out.checks[1].pass);
        assert_eq!(out.tables[0].rows.len(), 2);
    }

    #[test]
    fn empty_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(run(&json!({}), dir.path()).is_err());
    }
}
