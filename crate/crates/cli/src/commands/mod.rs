//! One module per command. Each parses its typed config, validates the
//! physical parameters before computing, and returns results, checks and tables.

pub mod eigen;
pub mod overdetermined;
pub mod properties;
pub mod radial;
pub mod report;
pub mod sector;
pub mod serrin;

use anyhow::{bail, Result};
use serde::{de::DeserializeOwned, Serialize};
use serde_json::Value;

use crate::config;
use crate::report::{Check, Table};

pub const COMMANDS: [&str; 7] = ["radial", "overdetermined", "eigen", "serrin", "sector", "properties", "report"];

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Value,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

/// Parses `raw` into `T` and returns it with its fully defaulted JSON form.
pub(crate) fn typed<T: DeserializeOwned + Serialize>(raw: &Value) -> Result<(T, Value)> {
    let cfg: T = config::parse(raw)?;
    let effective = serde_json::to_value(&cfg)?;
    Ok((cfg, effective))
}

/// Runs `command` on the merged config. `out` is the output directory,
/// which the `report` command reads.
pub fn run(command: &str, raw: &Value, out: &std::path::Path) -> Result<(Value, Outcome)> {
    match command {
        "radial" => radial::run(raw),
        "overdetermined" => overdetermined::run(raw),
        "eigen" => eigen::run(raw),
        "serrin" => serrin::run(raw),
        "sector" => sector::run(raw),
        "properties" => properties::run(raw),
        "report" => report::run(raw, out),
        other => bail!("unknown command `{other}`; expected one of {}", COMMANDS.join(", ")),
    }
}
