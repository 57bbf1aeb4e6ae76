//! Command-line front end for the trilinear-coupling sensing toolkit:
//! configuration parsing, experiment execution, figure reproduction,
//! parameter sweeps, trap reports, and the numerical selftest.

pub mod config;
pub mod csvfmt;
mod error;
pub mod fit;
pub mod modes;
pub mod reproduce;
pub mod runner;
pub mod selftest;
pub mod sweep;

pub use error::{io_err, CliError};
