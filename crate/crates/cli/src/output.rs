//! JSON-lines and CSV report writers.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn render(lines: &[Value], format: Format) -> String {
    match format {
        Format::Json => lines.iter().map(|l| format!("{l}\n")).collect(),
        Format::Csv => csv(lines),
    }
}

fn scalar_fields(v: &Value) -> Vec<(&str, &Value)> {
    match v {
        Value::Object(m) => m
            .iter()
            .filter(|(_, x)| !matches!(x, Value::Object(_) | Value::Array(_)))
            .map(|(k, x)| (k.as_str(), x))
            .collect(),
        _ => Vec::new(),
    }
}

/// Top-level scalar fields only; columns in order of first appearance.
fn csv(lines: &[Value]) -> String {
    let mut columns: Vec<&str> = Vec::new();
    for l in lines {
        for (k, _) in scalar_fields(l) {
            if !columns.contains(&k) {
                columns.push(k);
            }
        }
    }
    let mut out = columns.join(",");
    out.push('\n');
    for l in lines {
        let row: Map<String, Value> = scalar_fields(l)
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect();
        let cells: Vec<String> = columns
            .iter()
            .map(|c| row.get(*c).map(cell).unwrap_or_default())
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => {
            format!("\"{}\"", s.replace('"', "\"\""))
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    let io = |source| CliError::Io {
        path: out.map_or("stdout".into(), |p| p.display().to_string()),
        source,
    };
    match out {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(io)?;
            stdout.flush().map_err(io)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_keeps_scalars_only() {
        let lines = vec![
            json!({"claim": "P1", "holds": true, "witness": {"f": 1}}),
            json!({"claim": "a,b", "worst": 1.5}),
        ];
        assert_eq!(
            render(&lines, Format::Csv),
            "claim,holds,worst\nP1,true,\n\"a,b\",,1.5\n"
        );
    }
}
