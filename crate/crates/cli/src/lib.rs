//! Library surface of the `nmf-forge` command-line tool: argument and
//! config handling, pipeline execution, and report rendering. The binary
//! in `main.rs` is a thin wrapper so integration tests can drive runs
//! directly.

pub mod config;
pub mod pipeline;
pub mod render;
pub mod synth_cmd;

pub use config::{CommandKind, Preset, RunConfig, RunOverrides};
pub use pipeline::{run, write_outputs, RunOutput};

/// Reads the `NMF_FORGE_SEED` fallback seed from the environment.
pub fn env_seed() -> Option<u64> {
    std::env::var("NMF_FORGE_SEED").ok().and_then(|v| v.parse().ok())
}
