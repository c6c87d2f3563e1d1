use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dag::{Dag, OperatorKind};
use crate::error::{Error, Result};
use crate::rng::{stream, Stream};

/// Baseline cost `linear * S + quadratic * S^2`, in slot units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpCost {
    pub linear: f64,
    #[serde(default)]
    pub quadratic: f64,
}

impl OpCost {
    pub const fn new(linear: f64, quadratic: f64) -> Self {
        OpCost { linear, quadratic }
    }

    pub fn eval(&self, tokens: f64) -> f64 {
        self.linear * tokens + self.quadratic * tokens * tokens
    }
}

/// Per-operator baseline latency curves. The three encoder blocks share one curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatencyModel {
    pub embed: OpCost,
    pub encoder: OpCost,
    pub proj: OpCost,
    pub align: OpCost,
    pub fusion: OpCost,
    pub classifier: OpCost,
    pub output: OpCost,
}

impl Default for LatencyModel {
    fn default() -> Self {
        LatencyModel {
            embed: OpCost::new(0.0020, 0.0),
            encoder: OpCost::new(0.0030, 8e-6),
            proj: OpCost::new(0.0015, 0.0),
            align: OpCost::new(0.0010, 0.0),
            fusion: OpCost::new(0.0025, 4e-6),
            classifier: OpCost::new(0.0015, 0.0),
            output: OpCost::new(0.0002, 0.0),
        }
    }
}

impl LatencyModel {
    pub fn cost(&self, kind: OperatorKind) -> OpCost {
        match kind {
            OperatorKind::Embed => self.embed,
            OperatorKind::Enc1 | OperatorKind::Enc2 | OperatorKind::Enc3 => self.encoder,
            OperatorKind::Proj => self.proj,
            OperatorKind::Align => self.align,
            OperatorKind::Fusion => self.fusion,
            OperatorKind::Classifier => self.classifier,
            OperatorKind::Output => self.output,
        }
    }
}

/// Bandwidth demand `clamp(base_kind + per_token * S + jitter, min, max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BandwidthModel {
    pub embed: f64,
    pub encoder: f64,
    pub proj: f64,
    pub align: f64,
    pub fusion: f64,
    pub classifier: f64,
    pub output: f64,
    pub per_token: f64,
    /// Half-width of the uniform jitter added to every entry.
    pub jitter: f64,
    pub min: f64,
    pub max: f64,
}

impl Default for BandwidthModel {
    fn default() -> Self {
        BandwidthModel {
            embed: 0.35,
            encoder: 0.25,
            proj: 0.20,
            align: 0.15,
            fusion: 0.30,
            classifier: 0.20,
            output: 0.15,
            per_token: 0.0005,
            jitter: 0.05,
            min: 0.2,
            max: 1.0,
        }
    }
}

impl BandwidthModel {
    pub fn base(&self, kind: OperatorKind) -> f64 {
        match kind {
            OperatorKind::Embed => self.embed,
            OperatorKind::Enc1 | OperatorKind::Enc2 | OperatorKind::Enc3 => self.encoder,
            OperatorKind::Proj => self.proj,
            OperatorKind::Align => self.align,
            OperatorKind::Fusion => self.fusion,
            OperatorKind::Classifier => self.classifier,
            OperatorKind::Output => self.output,
        }
    }
}

/// Inputs of the synthetic workload generator.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadGenConfig {
    /// Tokens per slice.
    pub token_sizes: Vec<u32>,
    /// Elements per token.
    pub feature_dim: u32,
    pub bytes_per_element: u32,
    /// Per-slice compression factor in (0, 1].
    pub compression: Vec<f64>,
    /// Protocol overhead, >= 1.
    pub overhead: f64,
    pub cores: usize,
    pub latency_scale: f64,
    pub slot_ms: f64,
    pub jitter_range: (f64, f64),
    pub speed_jitter_range: (f64, f64),
    pub latency_model: LatencyModel,
    pub bandwidth_model: BandwidthModel,
    pub seed: u64,
}

impl WorkloadGenConfig {
    pub fn validate(&self) -> Result<()> {
        let k = self.token_sizes.len();
        if self.compression.len() != k {
            return Err(Error::config(format!(
                "compression length {} ≠ K={k}",
                self.compression.len()
            )));
        }
        if let Some(i) = self.token_sizes.iter().position(|&n| n == 0) {
            return Err(Error::config(format!("token_sizes[{i}] must be >= 1")));
        }
        if let Some(i) = self.compression.iter().position(|&c| !(c > 0.0 && c <= 1.0)) {
            return Err(Error::config(format!("compression[{i}] must lie in (0, 1]")));
        }
        if !(self.overhead >= 1.0) {
            return Err(Error::config("overhead must be >= 1"));
        }
        if self.feature_dim == 0 || self.bytes_per_element == 0 {
            return Err(Error::config("feature_dim and bytes_per_element must be >= 1"));
        }
        if self.cores == 0 {
            return Err(Error::config("cores must be >= 1"));
        }
        if !(self.latency_scale > 0.0) {
            return Err(Error::config("latency_scale must be > 0"));
        }
        if !(self.slot_ms > 0.0) {
            return Err(Error::config("slot_ms must be > 0"));
        }
        let (lo, hi) = self.jitter_range;
        if !(lo > 0.0 && hi >= lo) {
            return Err(Error::config("jitter_range must satisfy 0 < lo <= hi"));
        }
        let (lo, hi) = self.speed_jitter_range;
        if !(hi >= lo && lo.is_finite() && hi.is_finite()) {
            return Err(Error::config("speed_jitter_range must satisfy lo <= hi"));
        }
        let bw = &self.bandwidth_model;
        if !(bw.min > 0.0 && bw.max <= 1.0 && bw.min <= bw.max) {
            return Err(Error::config("bandwidth_model clamp must satisfy 0 < min <= max <= 1"));
        }
        Ok(())
    }

    pub fn modality_count(&self) -> usize {
        self.token_sizes.len()
    }

    /// Token scale of a job: its slice's tokens, or the sum over all slices.
    pub fn token_scale(&self, slice: Option<usize>) -> f64 {
        match slice {
            Some(k) => self.token_sizes[k] as f64,
            None => self.token_sizes.iter().map(|&n| n as f64).sum(),
        }
    }
}

/// Size of one slice on the air.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Payload {
    pub bytes: f64,
}

impl Payload {
    pub fn bits(&self) -> f64 {
        8.0 * self.bytes
    }

    /// Kilobytes of 1024 bytes.
    pub fn kib(&self) -> f64 {
        self.bytes / 1024.0
    }
}

pub fn compute_payloads(cfg: &WorkloadGenConfig) -> Result<Vec<Payload>> {
    cfg.validate()?;
    Ok(cfg
        .token_sizes
        .iter()
        .zip(&cfg.compression)
        .map(|(&n, &kappa)| Payload {
            bytes: n as f64
                * cfg.feature_dim as f64
                * cfg.bytes_per_element as f64
                * kappa
                * cfg.overhead,
        })
        .collect())
}

/// Per-(job, core) latency and bandwidth demand, with the derived work and
/// core-averaged latency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileTable {
    latency: Vec<Vec<f64>>,
    demand: Vec<Vec<f64>>,
    work: Vec<Vec<f64>>,
    mean_latency: Vec<f64>,
}

impl ProfileTable {
    /// `latency[v][c]` in ms, `demand[v][c]` as a fraction of the budget.
    pub fn new(latency: Vec<Vec<f64>>, demand: Vec<Vec<f64>>) -> Result<Self> {
        if latency.len() != demand.len() || latency.is_empty() {
            return Err(Error::config("latency and demand tables must have the same nonzero job count"));
        }
        let cores = latency[0].len();
        if cores == 0 {
            return Err(Error::config("profile needs at least one core"));
        }
        for (v, (l, b)) in latency.iter().zip(&demand).enumerate() {
            if l.len() != cores || b.len() != cores {
                return Err(Error::config(format!("job {v}: expected {cores} core entries")));
            }
            if l.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(Error::config(format!("job {v}: latency must be positive")));
            }
            if b.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
                return Err(Error::config(format!("job {v}: bandwidth demand must lie in (0, 1]")));
            }
        }
        let work = latency
            .iter()
            .zip(&demand)
            .map(|(l, b)| l.iter().zip(b).map(|(l, b)| l * b).collect())
            .collect();
        let mean_latency = latency
            .iter()
            .map(|l| l.iter().sum::<f64>() / cores as f64)
            .collect();
        Ok(ProfileTable { latency, demand, work, mean_latency })
    }

    pub fn job_count(&self) -> usize {
        self.latency.len()
    }

    pub fn core_count(&self) -> usize {
        self.latency[0].len()
    }

    pub fn latency(&self, v: usize, c: usize) -> f64 {
        self.latency[v][c]
    }

    pub fn demand(&self, v: usize, c: usize) -> f64 {
        self.demand[v][c]
    }

    pub fn work(&self, v: usize, c: usize) -> f64 {
        self.work[v][c]
    }

    pub fn mean_latency(&self) -> &[f64] {
        &self.mean_latency
    }

    pub fn latency_table(&self) -> &[Vec<f64>] {
        &self.latency
    }

    pub fn demand_table(&self) -> &[Vec<f64>] {
        &self.demand
    }
}

fn uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

/// Relative core speeds `max(1 + u_c, 0.7)`.
pub fn core_speeds(cfg: &WorkloadGenConfig) -> Vec<f64> {
    let mut rng = stream(cfg.seed, Stream::CoreSpeed);
    (0..cfg.cores)
        .map(|_| (1.0 + uniform(&mut rng, cfg.speed_jitter_range)).max(0.7))
        .collect()
}

/// Draws the synthetic latency and bandwidth tables for every job and core.
pub fn generate_profile(dag: &Dag, cfg: &WorkloadGenConfig) -> Result<ProfileTable> {
    cfg.validate()?;
    if dag.modality_count() != cfg.modality_count() {
        return Err(Error::config(format!(
            "graph has {} modalities but {} token sizes were given",
            dag.modality_count(),
            cfg.modality_count()
        )));
    }
    let speeds = core_speeds(cfg);
    let mut jitter = stream(cfg.seed, Stream::LatencyJitter);
    let mut bw_jitter = stream(cfg.seed, Stream::BandwidthJitter);
    let bw = &cfg.bandwidth_model;

    let mut latency = Vec::with_capacity(dag.len());
    let mut demand = Vec::with_capacity(dag.len());
    for job in dag.jobs() {
        let tokens = cfg.token_scale(job.slice);
        let base = cfg.latency_model.cost(job.kind).eval(tokens) * cfg.latency_scale * cfg.slot_ms;
        let row_l: Vec<f64> = speeds
            .iter()
            .map(|speed| base * uniform(&mut jitter, cfg.jitter_range) / speed)
            .collect();
        let mean_b = bw.base(job.kind) + bw.per_token * tokens;
        let row_b: Vec<f64> = (0..cfg.cores)
            .map(|_| {
                let j = uniform(&mut bw_jitter, (-bw.jitter, bw.jitter));
                (mean_b + j).clamp(bw.min, bw.max)
            })
            .collect();
        latency.push(row_l);
        demand.push(row_b);
    }
    ProfileTable::new(latency, demand)
}
