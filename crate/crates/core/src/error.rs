use thiserror::Error;

use crate::tableau::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid border path: {0}")]
    InvalidPath(String),

    #[error("tableau failed validation: {}", format_violations(.0))]
    InvalidTableau(Vec<Violation>),

    #[error("extension choice out of range: {0}")]
    BadExtension(String),

    #[error("{what} = {requested} exceeds the configured cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
