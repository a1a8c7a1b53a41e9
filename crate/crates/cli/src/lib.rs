//! Configuration loading, parameter sweeps and result tables behind the
//! `semi-isac` command line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod selftest;
pub mod sweep;
pub mod table;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] semi_isac_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
