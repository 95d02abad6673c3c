//! Run harness for the `coordsim` command line: JSON run configs, command
//! dispatch, seeded parallel sweeps, CSV/JSON tables and digest manifests.
//!
//! Every output is a pure function of the config snapshot recorded in the
//! manifest; the worker count never changes a byte of output.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod error;
pub mod manifest;
pub mod output;
pub mod run;

pub use config::{parse_config, CommandKind, Format, RunConfig};
pub use error::HarnessError;
pub use manifest::{sha256_file, OutputFile, RunManifest};
pub use run::{run_command, RunOptions};
