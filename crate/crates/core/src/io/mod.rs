//! Configuration, command dispatch and reproducible file output.

pub mod commands;
pub mod config;
pub mod csvfmt;
pub mod manifest;

pub use commands::{execute, replay, run, Artifact, Command};
pub use config::RunConfig;
pub use manifest::RunManifest;

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "OPTOMECH_SQUEEZE_OUT";
