//! File formats, atomic output and the command line front end built on
//! `motive-core`.

pub mod checkpoint;
pub mod cli;
pub mod dic;
pub mod fingerprint;
pub mod jsonl;
pub mod output;
pub mod tsv;
pub mod vecfile;

use std::path::{Path, PathBuf};

/// I/O failure tagged with the path involved.
#[derive(Debug, thiserror::Error)]
#[error("{path}: {source}")]
pub struct PathIoError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

pub fn read_to_string(path: &Path) -> Result<String, PathIoError> {
    std::fs::read_to_string(path).map_err(|source| PathIoError {
        path: path.to_path_buf(),
        source,
    })
}
