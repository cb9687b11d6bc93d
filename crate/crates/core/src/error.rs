use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("conllu parse error, line {line}: {msg}")]
    Conllu { line: usize, msg: String },

    #[error("tree parse error at offset {offset}: {msg}")]
    Tree { offset: usize, msg: String },

    #[error("manifest load error:\n{}", .0.join("\n"))]
    Manifest(Vec<String>),

    #[error("degenerate input{}: {msg}", doc_suffix(.doc_id))]
    Degenerate { doc_id: Option<String>, msg: String },

    #[error("extraction failed for documents [{}]: {}", .doc_ids.join(", "), .first)]
    Extraction {
        doc_ids: Vec<String>,
        first: Box<Error>,
    },

    #[error("lexicon {}: {msg}", .path.display())]
    Lexicon { path: PathBuf, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("soft label error: {0}")]
    SoftLabels(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn doc_suffix(doc_id: &Option<String>) -> String {
    match doc_id {
        Some(id) => format!(" in document {id}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate {
            doc_id: None,
            msg: msg.into(),
        }
    }

    /// Attach a document id to a degenerate-input error that lacks one.
    pub(crate) fn in_doc(self, id: &str) -> Self {
        match self {
            Error::Degenerate { doc_id: None, msg } => Error::Degenerate {
                doc_id: Some(id.to_string()),
                msg,
            },
            other => other,
        }
    }
}
