//! Error type shared by every module in the crate.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across image I/O, labeling, training,
/// inference, and the command layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: invalid image file: {reason}")]
    ImageFormat { path: PathBuf, reason: String },

    #[error("{path}:{line}: invalid box record: {reason}")]
    BoxFormat {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}:{line}: invalid config entry: {reason}")]
    ConfigFormat {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}: invalid model file: {reason}")]
    ModelFormat { path: PathBuf, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("labeling function {lf_id}: map is {got_w}x{got_h}, expected {want_w}x{want_h}")]
    MapDimensionMismatch {
        lf_id: String,
        got_w: u32,
        got_h: u32,
        want_w: u32,
        want_h: u32,
    },

    #[error("labeling function registry mismatch: {0}")]
    RegistryMismatch(String),

    #[error("missing required file {path}")]
    MissingFile { path: PathBuf },

    #[error("unmatched files between directories: {0}")]
    UnmatchedFiles(String),

    #[error("infeasible page layout: {0}")]
    Layout(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Process exit code the command-line tool reports for this error:
    /// 2 for data and configuration problems, 3 for numerical failures.
    /// (Usage errors exit 1 before any library call is made.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 3,
            _ => 2,
        }
    }
}
