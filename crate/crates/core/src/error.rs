use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A line that is not valid JSON (or not the expected JSON shape).
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Structurally valid input that violates a file format contract.
    #[error("{}", format_location(*line, message))]
    Format { line: Option<usize>, message: String },

    #[error("{0}")]
    Validation(String),
}

fn format_location(line: Option<usize>, message: &str) -> String {
    match line {
        Some(line) => format!("line {line}: {message}"),
        None => message.to_string(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format_at(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line: Some(line),
            message: message.into(),
        }
    }

    pub(crate) fn format(message: impl Into<String>) -> Self {
        Error::Format {
            line: None,
            message: message.into(),
        }
    }

    pub(crate) fn validation(message: impl Into<String>) -> Self {
        Error::Validation(message.into())
    }
}
