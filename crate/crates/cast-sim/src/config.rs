//! Experiment configuration: one TOML file describes one experiment.

use serde::{Deserialize, Serialize};

/// A scalar or a sweep list; both deserialize from TOML naturally.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sweep<T> {
    Scalar(T),
    List(Vec<T>),
}

impl<T: Clone> Sweep<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            Sweep::Scalar(v) => vec![v.clone()],
            Sweep::List(v) => v.clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Sweep::List(v) if v.is_empty())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRuleChoice {
    ChannelAware,
    UniformRandom,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulationChoice {
    Qpsk,
}

/// Latency model attached to simulation sweeps: the short-buffer access
/// attempt at each cell's sample count, with geometric retries.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimLatencyConfig {
    pub t_dec_us: f64,
    pub t_prop_us: f64,
    pub retry_period_ms: f64,
}

impl Default for SimLatencyConfig {
    fn default() -> Self {
        SimLatencyConfig { t_dec_us: 66.7, t_prop_us: 10.0, retry_period_ms: 2.0 }
    }
}

/// Configuration for the latency-table command: the three access systems
/// evaluated over a set of TDD patterns with the frozen calibration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TableLatencyConfig {
    pub patterns: Vec<String>,
    pub m_grant: usize,
    pub minislot_symbols: usize,
}

impl Default for TableLatencyConfig {
    fn default() -> Self {
        TableLatencyConfig {
            patterns: vec!["DSUDDDDDDD".into(), "DDDDDSUDSU".into()],
            m_grant: 256,
            minislot_symbols: 2,
        }
    }
}

fn default_modulation() -> ModulationChoice {
    ModulationChoice::Qpsk
}

fn default_bound_trials() -> usize {
    400
}

/// One experiment: the sweep grid, trial budget, seed, and sub-models.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub n: usize,
    pub k: Sweep<usize>,
    pub m: Sweep<usize>,
    pub snr_db: Sweep<f64>,
    pub tau: usize,
    pub trials: usize,
    pub seed: u64,
    pub selection_rule: SelectionRuleChoice,
    #[serde(default)]
    pub channel_error_variance: f64,
    #[serde(default = "default_modulation")]
    pub modulation: ModulationChoice,
    #[serde(default)]
    pub compute_bound: bool,
    #[serde(default = "default_bound_trials")]
    pub bound_trials: usize,
    #[serde(default)]
    pub latency: SimLatencyConfig,
    #[serde(default)]
    pub latency_table: TableLatencyConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| format!("config parse error: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.experiment_id.is_empty() {
            return Err("experiment_id: must be non-empty".into());
        }
        if self.n == 0 {
            return Err("n: must be >= 1".into());
        }
        if self.trials == 0 {
            return Err("trials: must be >= 1".into());
        }
        if self.tau == 0 {
            return Err("tau: must be >= 1".into());
        }
        if self.k.is_empty() || self.m.is_empty() || self.snr_db.is_empty() {
            return Err("k/m/snr_db: sweep lists must be non-empty".into());
        }
        let min_m = *self.m.values().iter().min().expect("non-empty");
        for &k in &self.k.values() {
            if k == 0 {
                return Err("k: must be >= 1".into());
            }
            if k > min_m {
                return Err("k: must be <= every swept m".into());
            }
        }
        for &m in &self.m.values() {
            if m == 0 || m > self.n {
                return Err("m: must satisfy 1 <= m <= n".into());
            }
        }
        if self.channel_error_variance < 0.0 {
            return Err("channel_error_variance: must be >= 0".into());
        }
        if self.bound_trials == 0 {
            return Err("bound_trials: must be >= 1".into());
        }
        if !(self.latency.t_dec_us >= 0.0
            && self.latency.t_prop_us >= 0.0
            && self.latency.retry_period_ms >= 0.0)
        {
            return Err("latency: times must be >= 0".into());
        }
        if self.latency_table.patterns.is_empty() {
            return Err("latency_table.patterns: must be non-empty".into());
        }
        Ok(())
    }
}
