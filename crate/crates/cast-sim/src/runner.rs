//! Command implementations shared by the CLI binary and integration tests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cast_core::latency::{
    cast_access_latency, conventional_mean_latency, minislot_access_latency,
    LatencyCalibration, TddFrameConfig,
};

use crate::config::ExperimentConfig;
use crate::manifest::RunManifest;
use crate::montecarlo::{run_sweep, to_csv};

/// Failure modes mapped to the process exit-code contract: configuration
/// problems exit 2, runtime problems exit 1.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Runtime(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Config(m) | RunError::Runtime(m) => m,
        }
    }
}

/// Loads and validates a config file; missing files and parse errors are
/// configuration errors.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, RunError> {
    let text = fs::read_to_string(path).map_err(|e| {
        RunError::Config(format!("cannot read config {}: {e}", path.display()))
    })?;
    ExperimentConfig::from_toml_str(&text)
        .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))
}

/// CLI overrides applied after loading.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

pub fn apply_overrides(cfg: &mut ExperimentConfig, ov: Overrides) -> Result<(), RunError> {
    if let Some(seed) = ov.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = ov.trials {
        cfg.trials = trials;
    }
    cfg.validate().map_err(RunError::Config)
}

fn write_output(path: &PathBuf, contents: &str) -> Result<(), RunError> {
    fs::write(path, contents)
        .map_err(|e| RunError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Runs the Monte Carlo sweep and writes `<id>.csv` plus
/// `<id>_manifest.json` into `out_dir`. Returns a one-line summary.
pub fn cmd_simulate(
    mut cfg: ExperimentConfig,
    out_dir: &Path,
    force_bound: bool,
) -> Result<String, RunError> {
    if force_bound {
        cfg.compute_bound = true;
    }
    let started = Instant::now();
    let results = run_sweep(&cfg);
    let csv = to_csv(&cfg.experiment_id, &results);

    fs::create_dir_all(out_dir)
        .map_err(|e| RunError::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    let csv_path = out_dir.join(format!("{}.csv", cfg.experiment_id));
    write_output(&csv_path, &csv)?;

    let manifest = RunManifest::new(
        cfg.clone(),
        started.elapsed().as_millis(),
        vec![csv_path.display().to_string()],
    );
    let manifest_path = out_dir.join(format!("{}_manifest.json", cfg.experiment_id));
    let json = manifest
        .to_json()
        .map_err(|e| RunError::Runtime(format!("manifest serialization: {e}")))?;
    write_output(&manifest_path, &json)?;

    Ok(format!(
        "{}: {} cells x {} trials -> {}",
        cfg.experiment_id,
        results.len(),
        cfg.trials,
        csv_path.display()
    ))
}

/// Latency table for the three access systems over the configured TDD
/// patterns, as CSV text.
pub fn latency_table_csv(cfg: &ExperimentConfig) -> Result<String, RunError> {
    let calib = LatencyCalibration::default();
    let table = &cfg.latency_table;
    let mut out = String::from("pattern,conventional_ms,minislot_ms,cast_ms\n");
    for pattern in &table.patterns {
        let frame = TddFrameConfig::new(pattern, cfg.n)
            .map_err(|e| RunError::Config(format!("latency_table pattern {pattern:?}: {e}")))?;
        let conv = conventional_mean_latency(&frame, &calib)
            .map_err(|e| RunError::Runtime(e.to_string()))?;
        let mini = minislot_access_latency(&frame, &calib, table.minislot_symbols)
            .map_err(|e| RunError::Config(format!("latency_table: {e}")))?;
        let cast = cast_access_latency(table.m_grant, &frame, &calib)
            .map_err(|e| RunError::Config(format!("latency_table: {e}")))?;
        out.push_str(&format!("{pattern},{conv},{},{}\n", mini.t_up(), cast.t_up()));
    }
    Ok(out)
}

/// Evaluates the latency table and writes `<id>_latency.csv`.
pub fn cmd_latency(cfg: ExperimentConfig, out_dir: &Path) -> Result<String, RunError> {
    let csv = latency_table_csv(&cfg)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| RunError::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    let path = out_dir.join(format!("{}_latency.csv", cfg.experiment_id));
    write_output(&path, &csv)?;
    Ok(format!("{}: latency table -> {}", cfg.experiment_id, path.display()))
}
