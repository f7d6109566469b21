//! Experiment configuration: a JSON object read from `--config`, patched by
//! `--set key=value` overrides, then parsed into the command's typed record.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

/// Reads the config file (an empty object when absent) and applies overrides.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Value> {
    let mut value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => Value::Object(Map::new()),
    };
    if !value.is_object() {
        bail!("config must be a JSON object");
    }
    for item in overrides {
        apply_override(&mut value, item)?;
    }
    Ok(value)
}

/// `key=value` with dotted keys for nested objects. The value is parsed as
/// JSON when possible and kept as a string otherwise.
pub fn apply_override(root: &mut Value, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| anyhow!("override `{item}` is not of the form key=value"))?;
    let parsed = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    let mut node = root;
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            bail!("empty segment in override key `{key}`");
        }
        let obj = node
            .as_object_mut()
            .ok_or_else(|| anyhow!("override key `{key}` descends into a non-object"))?;
        if i + 1 == parts.len() {
            obj.insert((*part).to_string(), parsed);
            return Ok(());
        }
        node = obj
            .entry((*part).to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    Ok(())
}

/// Typed view of the merged config; unknown keys are rejected.
pub fn parse<T: DeserializeOwned>(value: &Value) -> Result<T> {
    serde_json::from_value(value.clone()).context("invalid config")
}
