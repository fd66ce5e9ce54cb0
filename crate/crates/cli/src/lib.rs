//! Batch driver: TOML config in, CSV/JSON (and optional PGM) out.

pub mod commands;
pub mod config;
pub mod output;

pub use config::RunConfig;
