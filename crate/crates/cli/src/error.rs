use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Every failure the front end can report. The exit code is part of the
/// contract: 2 for bad input, 3 for numerical trouble, 1 for output that
/// could not be written.
#[derive(Debug)]
pub enum CliError {
    Read { path: PathBuf, message: String },
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    Validation(String),
    Numerical(String),
    Write { path: PathBuf, message: String },
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Read { .. } | Self::Parse { .. } | Self::Validation(_) | Self::Usage(_) => 2,
            Self::Numerical(_) => 3,
            Self::Write { .. } => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Read { .. } => "read",
            Self::Parse { .. } => "parse",
            Self::Validation(_) => "validation",
            Self::Numerical(_) => "numerical",
            Self::Write { .. } => "write",
            Self::Usage(_) => "usage",
        }
    }

    pub fn read(path: &Path, err: impl fmt::Display) -> Self {
        Self::Read {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }

    pub fn write(path: &Path, err: impl fmt::Display) -> Self {
        Self::Write {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }

    pub fn parse(path: &Path, err: &serde_json::Error) -> Self {
        Self::Parse {
            path: path.to_path_buf(),
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }

    pub fn validation(err: impl fmt::Display) -> Self {
        Self::Validation(err.to_string())
    }

    pub fn numerical(err: impl fmt::Display) -> Self {
        Self::Numerical(err.to_string())
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            exit_code: u8,
            message: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            path: Option<&'a Path>,
            #[serde(skip_serializing_if = "Option::is_none")]
            line: Option<usize>,
            #[serde(skip_serializing_if = "Option::is_none")]
            column: Option<usize>,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        let (path, line, column) = match self {
            Self::Read { path, .. } | Self::Write { path, .. } => (Some(path.as_path()), None, None),
            Self::Parse { path, line, column, .. } => (Some(path.as_path()), Some(*line), Some(*column)),
            _ => (None, None, None),
        };
        let body = Body {
            kind: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
            path,
            line,
            column,
        };
        serde_json::to_string(&Wrapper { error: body }).expect("error body serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Read { path, message } => write!(f, "cannot read {}: {message}", path.display()),
            Self::Parse { path, line, column, message } => {
                write!(f, "{}:{line}:{column}: {message}", path.display())
            }
            Self::Validation(m) | Self::Numerical(m) | Self::Usage(m) => f.write_str(m),
            Self::Write { path, message } => write!(f, "cannot write {}: {message}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}
