use std::path::PathBuf;

use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {field}: {message}")]
    Schema {
        path: PathBuf,
        field: String,
        message: String,
    },
    #[error("sequence is not closed: residual boost rapidity {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Residual { residual: f64, tolerance: f64 },
    #[error("{0}")]
    Core(#[from] polthomas::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 for numeric failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Residual { .. } | CliError::Core(polthomas::Error::NotClosed { .. }) => 2,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Schema { .. } => "schema",
            CliError::Residual { .. } => "residual",
            CliError::Core(polthomas::Error::NotClosed { .. }) => "residual",
            CliError::Core(polthomas::Error::Domain(_)) => "domain",
            CliError::Core(polthomas::Error::Degenerate(_)) => "degenerate",
            CliError::Core(polthomas::Error::Consistency(_)) => "consistency",
            CliError::Usage(_) => "usage",
        }
    }

    /// `{"error": {"kind": …, "message": …, …}}`.
    pub fn to_json(&self) -> Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        let extra = match self {
            CliError::Io { path, .. } | CliError::Parse { path, .. } => json!({ "file": path.display().to_string() }),
            CliError::Schema { path, field, .. } => json!({ "file": path.display().to_string(), "field": field }),
            CliError::Residual { residual, tolerance } => {
                json!({ "residual_rapidity": residual, "tolerance": tolerance })
            }
            CliError::Core(polthomas::Error::NotClosed { residual }) => json!({ "residual_rapidity": residual }),
            _ => json!({}),
        };
        if let (Some(b), Value::Object(e)) = (body.as_object_mut(), extra) {
            b.extend(e);
        }
        json!({ "error": body })
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
