//! Reproducible experiments over the `pucci-lab` crate with JSON reports
//! and CSV tables.

pub mod commands;
pub mod config;
pub mod report;

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};

use report::{RunReport, Timing, TOOL_VERSION};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "PUCCI_LAB_THREADS";

/// Loads the config, runs `command`, and writes `<command>.report.json`
/// and the command's tables into `out`.
pub fn execute(command: &str, config_path: Option<&Path>, overrides: &[String], out: &Path) -> Result<RunReport> {
    let raw = config::load(config_path, overrides)?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();
    let (parameters, outcome) = commands::run(command, &raw, out)?;
    let report = RunReport {
        command: command.to_string(),
        tool_version: TOOL_VERSION.to_string(),
        parameters,
        results: outcome.results,
        checks: outcome.checks,
        timing: Timing {
            started_unix: started,
            wall_time_s: clock.elapsed().as_secs_f64(),
        },
    };
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for t in &outcome.tables {
        t.write(out)?;
    }
    report.write(out)?;
    Ok(report)
}
