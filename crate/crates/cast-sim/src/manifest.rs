//! Run manifest: the resolved configuration, seed, and outputs of one run,
//! sufficient to reproduce the CSV byte-for-byte.

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    /// Resolved configuration after CLI overrides were applied.
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub tool_version: String,
    pub wall_clock_ms: u128,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(
        config: ExperimentConfig,
        wall_clock_ms: u128,
        outputs: Vec<String>,
    ) -> Self {
        RunManifest {
            master_seed: config.seed,
            config,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_ms,
            outputs,
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}
