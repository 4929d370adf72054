//! Batch front-end for the secrecy-outage library.
//!
//! [`config`] parses JSON scenario files (all dB-valued fields carry an
//! explicit `_db` suffix), [`sweep`] runs parameter sweeps and writes the
//! CSV curves behind the paper-style figures, and [`selftest`] checks the
//! closed form against quadrature and Monte Carlo on randomized scenarios.

// Guards of the form `!(x > 0.0)` are deliberate: they reject NaN along
// with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod selftest;
pub mod sweep;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or schema-violating configuration text.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] sop_core::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code: 1 validation, 2 numerical consistency, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(sop_core::Error::Validation(_)) => 1,
            CliError::Core(sop_core::Error::Domain(_)) => 1,
            CliError::Core(sop_core::Error::QuadratureNoConvergence { .. }) => 2,
            CliError::Core(sop_core::Error::Consistency(_)) => 2,
            CliError::Io(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
