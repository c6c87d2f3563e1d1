use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;

use super::metrics::gain_pct;
use super::pipeline::{run_with, Pacs, Rtfs, Scenario};
use crate::config::{ExperimentConfig, Mode};
use crate::error::{Error, Result};

/// The parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDimension {
    Cores,
    Subcarriers,
    LatencyScale,
    BMax,
    TokenVector,
    CompressionVector,
}

impl SweepDimension {
    pub const ALL: [SweepDimension; 6] = [
        SweepDimension::Cores,
        SweepDimension::Subcarriers,
        SweepDimension::LatencyScale,
        SweepDimension::BMax,
        SweepDimension::TokenVector,
        SweepDimension::CompressionVector,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepDimension::Cores => "cores",
            SweepDimension::Subcarriers => "subcarriers",
            SweepDimension::LatencyScale => "latency_scale",
            SweepDimension::BMax => "b_max",
            SweepDimension::TokenVector => "token_vector",
            SweepDimension::CompressionVector => "compression_vector",
        }
    }

    pub fn is_vector(self) -> bool {
        matches!(self, SweepDimension::TokenVector | SweepDimension::CompressionVector)
    }

    /// Parses a value list: comma-separated scalars, or semicolon-separated
    /// vectors of comma-separated entries for the vector dimensions.
    pub fn parse_values(self, text: &str) -> Result<Vec<SweepValue>> {
        let values: Vec<SweepValue> = if self.is_vector() {
            text.split(';')
                .filter(|s| !s.trim().is_empty())
                .map(|v| {
                    v.split(',')
                        .map(|x| x.trim().parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map(SweepValue::Vector)
                        .map_err(|e| Error::config(format!("bad {} value {v:?}: {e}", self.name())))
                })
                .collect::<Result<_>>()?
        } else {
            text.split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map(SweepValue::Scalar)
                        .map_err(|e| Error::config(format!("bad {} value {x:?}: {e}", self.name())))
                })
                .collect::<Result<_>>()?
        };
        if values.is_empty() {
            return Err(Error::config("sweep needs at least one value"));
        }
        Ok(values)
    }
}

impl fmt::Display for SweepDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepDimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepDimension::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SweepDimension::ALL.iter().map(|d| d.name()).collect();
                Error::config(format!("unknown sweep dimension {s:?}; expected one of {names:?}"))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepValue {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl fmt::Display for SweepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::Scalar(x) => write!(f, "{x}"),
            SweepValue::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(" "))
            }
        }
    }
}

fn as_count(dim: SweepDimension, x: f64) -> Result<usize> {
    if x >= 1.0 && x.fract() == 0.0 && x.is_finite() {
        Ok(x as usize)
    } else {
        Err(Error::config(format!("{} must be a positive integer, got {x}", dim.name())))
    }
}

/// Returns `cfg` with `dim` set to `value`.
pub fn apply(cfg: &ExperimentConfig, dim: SweepDimension, value: &SweepValue) -> Result<ExperimentConfig> {
    let mut out = cfg.clone();
    match (dim, value) {
        (SweepDimension::Cores, SweepValue::Scalar(x)) => out.cores = as_count(dim, *x)?,
        (SweepDimension::Subcarriers, SweepValue::Scalar(x)) => out.subcarriers = as_count(dim, *x)?,
        (SweepDimension::LatencyScale, SweepValue::Scalar(x)) => out.latency_scale = *x,
        (SweepDimension::BMax, SweepValue::Scalar(x)) => out.b_max = *x,
        (SweepDimension::TokenVector, SweepValue::Vector(v)) => {
            let tokens = v
                .iter()
                .map(|&x| as_count(dim, x).map(|n| n as u32))
                .collect::<Result<Vec<_>>>()?;
            if tokens.len() != out.compression.len() {
                return Err(Error::config(format!(
                    "token vector length {} ≠ compression length {}",
                    tokens.len(),
                    out.compression.len()
                )));
            }
            out.modalities = tokens.len();
            out.token_sizes = tokens;
        }
        (SweepDimension::CompressionVector, SweepValue::Vector(v)) => {
            if v.len() != out.token_sizes.len() {
                return Err(Error::config(format!(
                    "compression vector length {} ≠ K={}",
                    v.len(),
                    out.token_sizes.len()
                )));
            }
            out.compression = v.clone();
        }
        _ => {
            return Err(Error::config(format!("value {value} does not fit dimension {}", dim.name())));
        }
    }
    out.validate()?;
    Ok(out)
}

/// Seed of replica `i` derived from the master seed.
pub fn replica_seed(master: u64, i: usize) -> u64 {
    master.wrapping_add(i as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Ok { makespan_ms: f64, comm_ms: f64, compute_ms: f64, t_start_ms: Option<f64> },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value_index: usize,
    pub value: String,
    pub seed: u64,
    pub mode: Mode,
    pub config_hash: String,
    pub outcome: CellOutcome,
}

impl SweepRow {
    pub fn makespan(&self) -> Option<f64> {
        match self.outcome {
            CellOutcome::Ok { makespan_ms, .. } => Some(makespan_ms),
            CellOutcome::Failed(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub dimension: String,
    /// Ordered by (value, seed, mode).
    pub rows: Vec<SweepRow>,
}

/// Runs both policies on the same scenario.
fn run_pair(cfg: &ExperimentConfig) -> [(Mode, CellOutcome); 2] {
    let outcome = |r: Result<super::pipeline::ExperimentResult>| match r {
        Ok(r) => CellOutcome::Ok {
            makespan_ms: r.makespan_ms,
            comm_ms: r.comm_ms,
            compute_ms: r.compute_ms,
            t_start_ms: r.t_start_ms,
        },
        Err(e) => CellOutcome::Failed(e.to_string()),
    };
    match Scenario::prepare(cfg) {
        Ok(s) => [
            (Mode::Rtfs, outcome(run_with(&s, &Rtfs))),
            (Mode::Pacs, outcome(run_with(&s, &Pacs))),
        ],
        Err(e) => [
            (Mode::Rtfs, CellOutcome::Failed(e.to_string())),
            (Mode::Pacs, CellOutcome::Failed(e.to_string())),
        ],
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    Ok(pool.install(f))
}

/// Paired RTFS/PACS runs for every value × seed. Both policies of a cell
/// share the channel trace and profile. A failing cell is recorded and the
/// sweep continues.
pub fn sweep(
    cfg: &ExperimentConfig,
    dim: SweepDimension,
    values: &[SweepValue],
    seeds: usize,
    threads: usize,
) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::config("sweep needs at least one value"));
    }
    if seeds == 0 {
        return Err(Error::config("seeds must be >= 1"));
    }
    let mut cells = Vec::with_capacity(values.len() * seeds);
    for (vi, value) in values.iter().enumerate() {
        let base = apply(cfg, dim, value)?;
        for i in 0..seeds {
            let mut c = base.clone();
            c.seed = replica_seed(cfg.seed, i);
            cells.push((vi, value.to_string(), c));
        }
    }
    let rows = in_pool(threads, || {
        cells
            .par_iter()
            .map(|(vi, label, c)| {
                let hash = c.config_hash();
                run_pair(c).map(|(mode, outcome)| SweepRow {
                    value_index: *vi,
                    value: label.clone(),
                    seed: c.seed,
                    mode,
                    config_hash: hash.clone(),
                    outcome,
                })
            })
            .collect::<Vec<_>>()
    })?;
    Ok(SweepTable { dimension: dim.name().to_string(), rows: rows.into_iter().flatten().collect() })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Per-value aggregate of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub value: String,
    pub rtfs_mean_ms: f64,
    pub rtfs_std_ms: f64,
    pub pacs_mean_ms: f64,
    pub pacs_std_ms: f64,
    /// Mean of per-seed paired gains, percent.
    pub mean_gain_pct: f64,
    pub gain_std_pct: f64,
    /// Paired seeds where both policies succeeded.
    pub pairs: usize,
    pub failures: usize,
}

impl SweepTable {
    pub fn summarize(&self) -> Vec<CellSummary> {
        let n_values = self.rows.iter().map(|r| r.value_index + 1).max().unwrap_or(0);
        (0..n_values)
            .map(|vi| {
                let rows: Vec<&SweepRow> = self.rows.iter().filter(|r| r.value_index == vi).collect();
                let pick = |mode| -> Vec<f64> {
                    rows.iter().filter(|r| r.mode == mode).filter_map(|r| r.makespan()).collect()
                };
                let mut gains = Vec::new();
                for r in rows.iter().filter(|r| r.mode == Mode::Rtfs) {
                    let partner = rows.iter().find(|p| p.mode == Mode::Pacs && p.seed == r.seed);
                    if let (Some(a), Some(b)) = (r.makespan(), partner.and_then(|p| p.makespan())) {
                        gains.push(gain_pct(a, b));
                    }
                }
                let (rtfs_mean_ms, rtfs_std_ms) = mean_std(&pick(Mode::Rtfs));
                let (pacs_mean_ms, pacs_std_ms) = mean_std(&pick(Mode::Pacs));
                let (mean_gain_pct, gain_std_pct) = mean_std(&gains);
                CellSummary {
                    value: rows.first().map(|r| r.value.clone()).unwrap_or_default(),
                    rtfs_mean_ms,
                    rtfs_std_ms,
                    pacs_mean_ms,
                    pacs_std_ms,
                    mean_gain_pct,
                    gain_std_pct,
                    pairs: gains.len(),
                    failures: rows.iter().filter(|r| r.makespan().is_none()).count(),
                }
            })
            .collect()
    }

    /// One row per (value, seed, mode).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "dimension,value,seed,mode,config_hash,status,makespan_ms,comm_ms,compute_ms,t_start_ms\n",
        );
        for r in &self.rows {
            match &r.outcome {
                CellOutcome::Ok { makespan_ms, comm_ms, compute_ms, t_start_ms } => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},ok,{makespan_ms},{comm_ms},{compute_ms},{}",
                        self.dimension,
                        r.value,
                        r.seed,
                        r.mode,
                        r.config_hash,
                        t_start_ms.map(|t| t.to_string()).unwrap_or_default()
                    );
                }
                CellOutcome::Failed(msg) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},\"failed: {}\",,,,",
                        self.dimension,
                        r.value,
                        r.seed,
                        r.mode,
                        r.config_hash,
                        msg.replace('"', "'")
                    );
                }
            }
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(
            "dimension,value,rtfs_mean_ms,rtfs_std_ms,pacs_mean_ms,pacs_std_ms,mean_gain_pct,gain_std_pct,pairs,failures\n",
        );
        for s in self.summarize() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                self.dimension,
                s.value,
                s.rtfs_mean_ms,
                s.rtfs_std_ms,
                s.pacs_mean_ms,
                s.pacs_std_ms,
                s.mean_gain_pct,
                s.gain_std_pct,
                s.pairs,
                s.failures
            );
        }
        out
    }
}

/// Token-length rows of the reference comparison grid.
pub const GRID_TOKENS: [[u32; 6]; 5] = [
    [128, 128, 128, 128, 128, 128],
    [64, 64, 128, 128, 256, 256],
    [64, 128, 256, 128, 192, 128],
    [512, 128, 256, 128, 192, 128],
    [512, 128, 256, 384, 192, 64],
];

/// Compression-factor columns of the reference comparison grid.
pub const GRID_COMPRESSION: [[f64; 6]; 5] = [
    [0.5, 0.5, 0.5, 0.5, 0.5, 0.5],
    [0.25, 0.25, 0.5, 0.5, 0.5, 0.5],
    [0.25, 0.25, 0.8, 0.6, 0.6, 0.6],
    [0.25, 0.25, 0.5, 0.5, 0.8, 0.8],
    [0.5, 0.5, 0.5, 0.5, 0.8, 0.8],
];

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub tokens: Vec<u32>,
    pub compression: Vec<f64>,
    pub summary: CellSummary,
}

/// Runs the token × compression grid, `seeds` paired replicas per cell.
pub fn token_compression_grid(
    cfg: &ExperimentConfig,
    tokens: &[Vec<u32>],
    compression: &[Vec<f64>],
    seeds: usize,
    threads: usize,
) -> Result<Vec<GridCell>> {
    let mut cells = Vec::new();
    for t in tokens {
        for c in compression {
            let base = cfg.clone().with_slices(t.clone(), c.clone());
            base.validate()?;
            cells.push((t.clone(), c.clone(), base));
        }
    }
    let jobs: Vec<(usize, ExperimentConfig)> = cells
        .iter()
        .enumerate()
        .flat_map(|(ci, (_, _, base))| {
            (0..seeds).map(move |i| {
                let mut c = base.clone();
                c.seed = replica_seed(cfg.seed, i);
                (ci, c)
            })
        })
        .collect();
    let results = in_pool(threads, || {
        jobs.par_iter()
            .map(|(ci, c)| {
                let hash = c.config_hash();
                run_pair(c).map(|(mode, outcome)| SweepRow {
                    value_index: *ci,
                    value: format!("cell{ci}"),
                    seed: c.seed,
                    mode,
                    config_hash: hash.clone(),
                    outcome,
                })
            })
            .collect::<Vec<_>>()
    })?;
    let table = SweepTable {
        dimension: "grid".to_string(),
        rows: results.into_iter().flatten().collect(),
    };
    Ok(table
        .summarize()
        .into_iter()
        .zip(cells)
        .map(|(summary, (tokens, compression, _))| GridCell { tokens, compression, summary })
        .collect())
}

/// The full 5 × 5 reference grid.
pub fn reference_grid(cfg: &ExperimentConfig, seeds: usize, threads: usize) -> Result<Vec<GridCell>> {
    let tokens: Vec<Vec<u32>> = GRID_TOKENS.iter().map(|r| r.to_vec()).collect();
    let compression: Vec<Vec<f64>> = GRID_COMPRESSION.iter().map(|r| r.to_vec()).collect();
    token_compression_grid(cfg, &tokens, &compression, seeds, threads)
}

pub fn grid_csv(cells: &[GridCell]) -> String {
    let mut out = String::from("tokens,compression,rtfs_mean_ms,pacs_mean_ms,mean_gain_pct,gain_std_pct,pairs,failures\n");
    for c in cells {
        let t: Vec<String> = c.tokens.iter().map(|x| x.to_string()).collect();
        let k: Vec<String> = c.compression.iter().map(|x| x.to_string()).collect();
        let s = &c.summary;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            t.join(" "),
            k.join(" "),
            s.rtfs_mean_ms,
            s.pacs_mean_ms,
            s.mean_gain_pct,
            s.gain_std_pct,
            s.pairs,
            s.failures
        );
    }
    out
}
