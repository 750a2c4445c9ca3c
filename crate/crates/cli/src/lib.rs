//! `ghk`: single-state reports, family sweeps and the verification suite from the command line.

pub mod args;
pub mod commands;
pub mod format;
pub mod input;

pub use args::Cli;
pub use commands::{run, Failure, PROFILE_ENV};
