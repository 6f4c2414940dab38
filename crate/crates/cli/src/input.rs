//! Reading channel and sweep specification files.

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::CliError;

/// Parses a JSON document, reporting failures with the path of the
/// offending field and its line and column.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, String> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let mut path = e.path().to_string();
        let inner = e.inner();
        let msg = inner.to_string();
        if let Some(field) = missing_field(&msg) {
            path = if path == "." {
                field.to_string()
            } else {
                format!("{path}.{field}")
            };
        }
        format!("{path}: {msg}")
    })?;
    de.end()
        .map_err(|e| format!("trailing content after the document: {e}"))?;
    Ok(value)
}

fn missing_field(msg: &str) -> Option<&str> {
    msg.strip_prefix("missing field `")?.split('`').next()
}

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
