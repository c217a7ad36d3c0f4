//! Optional JSON configuration. Top-level keys apply to every command and a
//! section named after the command overrides them; flags override both.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

pub const CONFIG_ENV: &str = "FRACCALC_CONFIG";

pub fn load(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("--config: cannot read {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Usage(format!("--config: {} must hold a JSON object", path.display()))),
        Err(e) => Err(CliError::Usage(format!("--config: {}: {e}", path.display()))),
    }
}

/// Layers config values under the parsed flags.
pub fn merge<T: Serialize + DeserializeOwned>(
    flags: T,
    config: Option<&Map<String, Value>>,
    command: &str,
) -> Result<T, CliError> {
    let Some(config) = config else { return Ok(flags) };
    let mut merged: Map<String, Value> =
        config.iter().filter(|(_, v)| !v.is_object()).map(|(k, v)| (k.clone(), v.clone())).collect();
    if let Some(Value::Object(section)) = config.get(command) {
        merged.extend(section.clone());
    }
    let Value::Object(set) = serde_json::to_value(&flags).expect("flag structs serialise") else {
        unreachable!("flag structs serialise to objects")
    };
    merged.extend(set.into_iter().filter(|(_, v)| !v.is_null()));
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::Usage(format!("--config: invalid value for {command}: {e}")))
}
