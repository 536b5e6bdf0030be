//! Standard-library companion to `dprag-core`: JSONL/TOML/CSV formats, the
//! HTTP completion generator, QA sweeps, membership-inference evaluation and
//! the `dprag` command-line interface.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod loader;
pub mod mia;
pub mod remote;

pub use error::{CliError, Result};
