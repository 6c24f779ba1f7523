//! File formats, benchmarking and the command-line front end for the
//! `abp-core` assumption-based HTN planner.
//!
//! * [`sexp`]: the s-expression reader shared by every format.
//! * [`parse`]: domain and problem files.
//! * [`print`]: pretty-printers for domains and problems.
//! * [`format`]: conjectures and reports as s-expressions or JSON lines.
//! * [`bench`]: timing the planner over a directory of instances.

use std::fs;
use std::path::{Path, PathBuf};

use abp_core::{Domain, Problem};

pub mod bench;
pub mod format;
pub mod parse;
pub mod print;
pub mod sexp;

pub use parse::{parse_domain, parse_problem, ParseError};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: no domain named {domain} was loaded")]
    MissingDomain { path: PathBuf, domain: String },
}

impl LoadError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        LoadError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn parse(path: &Path, source: ParseError) -> Self {
        LoadError::Parse {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub fn load_domain(path: &Path) -> Result<Domain, LoadError> {
    let text = fs::read_to_string(path).map_err(|e| LoadError::io(path, e))?;
    parse_domain(&text).map_err(|e| LoadError::parse(path, e))
}

pub fn load_problem(path: &Path, domain: &Domain) -> Result<Problem, LoadError> {
    let text = fs::read_to_string(path).map_err(|e| LoadError::io(path, e))?;
    parse_problem(&text, domain).map_err(|e| LoadError::parse(path, e))
}
