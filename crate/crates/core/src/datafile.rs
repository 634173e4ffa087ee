//! Error positions for the plain-text data files (grammars, lexicons,
//! models, compatibility tables).

use thiserror::Error;

use crate::term::TermError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct FileError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl FileError {
    pub fn at(src: &str, offset: usize, message: impl Into<String>) -> Self {
        let before = &src[..offset.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        FileError {
            line,
            column,
            message: message.into(),
        }
    }

    /// Positions parse errors exactly and anything else at `stmt`, the
    /// offset of the statement being read.
    pub fn from_term(src: &str, e: TermError, stmt: usize) -> Self {
        match e {
            TermError::Parse { offset, message } => FileError::at(src, offset, message),
            other => FileError::at(src, stmt, other.to_string()),
        }
    }
}
