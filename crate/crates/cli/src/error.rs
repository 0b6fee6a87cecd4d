use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{flag}: malformed JSON at line {line}, column {column}: {msg}")]
    Json {
        flag: &'static str,
        line: usize,
        column: usize,
        msg: String,
    },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] rikit::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn json(flag: &'static str, e: serde_json::Error) -> Self {
        // Data errors (unknown variants, failed validation) carry a position
        // too; only the message differs.
        CliError::Json {
            flag,
            line: e.line(),
            column: e.column(),
            msg: strip_position(&e.to_string()),
        }
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub type CliResult<T> = Result<T, CliError>;
