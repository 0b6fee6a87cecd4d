//! Reading spec and function arguments: inline JSON or `@path`.

use serde::de::DeserializeOwned;

use crate::error::{CliError, CliResult};

fn read_arg(raw: &str) -> CliResult<String> {
    match raw.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_string(),
            source,
        }),
        None => Ok(raw.to_string()),
    }
}

pub fn parse<T: DeserializeOwned>(flag: &'static str, raw: &str) -> CliResult<T> {
    let text = read_arg(raw)?;
    serde_json::from_str(&text).map_err(|e| CliError::json(flag, e))
}
