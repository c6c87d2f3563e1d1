//! Experiment configuration and its JSON form.
//!
//! Every field has a default (the reference scenario); a JSON document only
//! needs to name the fields it overrides. Unknown keys are rejected.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::workload::{BandwidthModel, LatencyModel, WorkloadGenConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    /// Release-time-first: deliver every slice, then compute behind a wait-all barrier.
    #[serde(rename = "RTFS")]
    Rtfs,
    /// Pipeline-aware co-scheduling: predictor-driven RBs, slice-gated compute.
    #[serde(rename = "PACS")]
    Pacs,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Rtfs => "RTFS",
            Mode::Pacs => "PACS",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RTFS" => Ok(Mode::Rtfs),
            "PACS" => Ok(Mode::Pacs),
            _ => Err(Error::config(format!("unknown mode {s:?} (expected RTFS or PACS)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Number of modalities / sensor nodes.
    #[serde(rename = "K")]
    pub modalities: usize,
    pub token_sizes: Vec<u32>,
    pub feature_dim: u32,
    pub bytes_per_element: u32,
    pub overhead: f64,
    pub compression: Vec<f64>,
    pub cores: usize,
    pub b_max: f64,
    pub slot_ms: f64,
    pub subcarriers: usize,
    /// Per-subcarrier rate range, kbit/s.
    pub rate_range: [f64; 2],
    pub horizon_slots: usize,
    pub jitter_range: [f64; 2],
    pub speed_jitter_range: [f64; 2],
    pub latency_scale: f64,
    pub latency_model: LatencyModel,
    pub bandwidth_model: BandwidthModel,
    /// Floor of the rate predictor, kbit/s.
    pub rate_floor: f64,
    /// Engine completion threshold, bandwidth·ms.
    pub engine_epsilon: f64,
    pub mode: Mode,
    pub seed: u64,
    pub replications: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            modalities: 6,
            token_sizes: vec![512, 128, 256, 128, 192, 128],
            feature_dim: 512,
            bytes_per_element: 2,
            overhead: 1.05,
            compression: vec![0.25, 0.25, 0.80, 0.60, 0.60, 0.60],
            cores: 4,
            b_max: 1.0,
            slot_ms: 1.0,
            subcarriers: 16,
            rate_range: [1000.0, 10000.0],
            horizon_slots: 8000,
            jitter_range: [0.9, 1.1],
            speed_jitter_range: [-0.08, 0.08],
            latency_scale: 6.0,
            latency_model: LatencyModel::default(),
            bandwidth_model: BandwidthModel::default(),
            rate_floor: 1e-6,
            engine_epsilon: 1e-9,
            mode: Mode::Rtfs,
            seed: 0,
            replications: 1,
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a JSON document; missing fields take defaults.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.modalities;
        if k < 2 {
            return Err(Error::config(format!("K must be >= 2, got {k}")));
        }
        if self.token_sizes.len() != k {
            return Err(Error::config(format!(
                "token_sizes length {} ≠ K={k}",
                self.token_sizes.len()
            )));
        }
        if self.compression.len() != k {
            return Err(Error::config(format!(
                "compression length {} ≠ K={k}",
                self.compression.len()
            )));
        }
        if self.cores == 0 {
            return Err(Error::config("cores must be >= 1"));
        }
        if self.subcarriers == 0 {
            return Err(Error::config("subcarriers must be >= 1"));
        }
        if self.horizon_slots == 0 {
            return Err(Error::config("horizon_slots must be >= 1"));
        }
        if !(self.b_max > 0.0 && self.b_max.is_finite()) {
            return Err(Error::config("b_max must be > 0"));
        }
        let [lo, hi] = self.rate_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::config("rate_range must satisfy 0 < lo <= hi"));
        }
        if !(self.rate_floor > 0.0) {
            return Err(Error::config("rate_floor must be > 0"));
        }
        if !(self.engine_epsilon > 0.0) {
            return Err(Error::config("engine_epsilon must be > 0"));
        }
        if self.replications == 0 {
            return Err(Error::config("replications must be >= 1"));
        }
        self.workload().validate()
    }

    pub fn workload(&self) -> WorkloadGenConfig {
        WorkloadGenConfig {
            token_sizes: self.token_sizes.clone(),
            feature_dim: self.feature_dim,
            bytes_per_element: self.bytes_per_element,
            compression: self.compression.clone(),
            overhead: self.overhead,
            cores: self.cores,
            latency_scale: self.latency_scale,
            slot_ms: self.slot_ms,
            jitter_range: (self.jitter_range[0], self.jitter_range[1]),
            speed_jitter_range: (self.speed_jitter_range[0], self.speed_jitter_range[1]),
            latency_model: self.latency_model,
            bandwidth_model: self.bandwidth_model,
            seed: self.seed,
        }
    }

    /// Sets K together with per-slice vectors.
    pub fn with_slices(mut self, tokens: Vec<u32>, compression: Vec<f64>) -> Self {
        self.modalities = tokens.len();
        self.token_sizes = tokens;
        self.compression = compression;
        self
    }

    /// Short SHA-256 of the scenario, excluding seed, mode and replications,
    /// so paired runs and seed replicas share one hash.
    pub fn config_hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = value.as_object_mut() {
            obj.remove("seed");
            obj.remove("mode");
            obj.remove("replications");
        }
        let digest = Sha256::digest(value.to_string().as_bytes());
        hex::encode(&digest[..8])
    }
}
