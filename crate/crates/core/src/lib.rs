//! Magnus and Baker–Campbell–Hausdorff expansion machinery.
//!
//! Exact combinatorics live in [`free_algebra`] and [`magnus_core`], minimal Lie
//! presentations in [`lie_min`], scalar bounds in [`bounds`], real 2×2 geometry in
//! [`gl2`], and time-ordered products over step measures in [`timeordered`].

pub mod bounds;
pub mod cli;
pub mod free_algebra;
pub mod gl2;
pub mod lie_min;
pub mod lp;
pub mod magnus_core;
pub mod numeric;
pub mod reproduce;
pub mod timeordered;
pub mod tolerances;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 2,
            Error::Resource(_) => 3,
            Error::Parse(_) | Error::Usage(_) => 1,
            Error::Internal(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
