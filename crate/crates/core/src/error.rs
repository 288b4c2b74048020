use thiserror::Error;

use crate::frontend::Diagnostic;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}", render_diagnostics(.0))]
    Parse(Vec<Diagnostic>),
    #[error("no framework statement reachable from entrypoint `{0}`")]
    EmptyUsage(String),
    #[error("order-constraint edges form a cycle through `{0}`")]
    Cycle(String),
    #[error("cannot merge a `{found}` GRAAM into a `{expected}` specification")]
    FrameworkMismatch { expected: String, found: String },
    #[error("evaluation set is empty")]
    EmptyEvalSet,
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("malformed artifact: {0}")]
    Artifact(String),
    #[error("io: {0}")]
    Io(String),
}

fn render_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Artifact(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
