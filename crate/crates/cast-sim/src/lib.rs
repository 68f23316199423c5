//! Batch experiment harness around `cast-core`: configuration, Monte Carlo
//! sweeps, latency tables, CSV/manifest output.

pub mod config;
pub mod manifest;
pub mod montecarlo;
pub mod runner;
