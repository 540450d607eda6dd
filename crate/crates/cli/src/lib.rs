//! File formats and command-line workflows around `gyroprior-core`.
//!
//! Every command reads its inputs, computes, and only then writes outputs,
//! each one atomically (temporary file plus rename). Exit codes: 0 success,
//! 2 configuration error, 3 bad input data, 4 processing failure.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod frames;
pub mod fsio;
pub mod kv;
pub mod overlay;
pub mod pnm;
pub mod profiles;
pub mod scene;
pub mod tables;

pub use error::{CliError, Result};
