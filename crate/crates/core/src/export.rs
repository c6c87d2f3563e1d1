//! Plot-ready artifacts. Every file carries the config hash and seed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::orchestrator::{ExperimentResult, Metrics};

#[derive(Serialize)]
struct MetricsDoc<'a> {
    #[serde(flatten)]
    metrics: &'a Metrics,
    config: &'a ExperimentConfig,
}

pub fn metrics_json(metrics: &Metrics, config: &ExperimentConfig) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&MetricsDoc { metrics, config })?;
    s.push('\n');
    Ok(s)
}

fn header(r: &ExperimentResult) -> String {
    format!("# config_hash={} seed={} mode={}\n", r.config_hash, r.seed, r.mode)
}

/// One JSON object per line: a meta record, then jobs, then interval shares.
pub fn schedule_jsonl(r: &ExperimentResult) -> Result<String> {
    let s = &r.schedule;
    let mut out = String::new();
    let meta = json!({
        "type": "meta",
        "config_hash": r.config_hash,
        "seed": r.seed,
        "mode": r.mode,
        "cores": s.cores,
        "clock_start_ms": s.clock_start_ms,
        "makespan_ms": s.makespan_ms,
    });
    out.push_str(&meta.to_string());
    out.push('\n');
    for j in &s.jobs {
        let mut v = serde_json::to_value(j)?;
        if let Value::Object(m) = &mut v {
            m.insert("type".into(), Value::from("job"));
        }
        out.push_str(&v.to_string());
        out.push('\n');
    }
    for iv in &s.intervals {
        for sh in &iv.shares {
            let v = json!({
                "type": "interval",
                "t_a": iv.t_a,
                "t_b": iv.t_b,
                "core": sh.core,
                "job": sh.job,
                "share": sh.share,
            });
            out.push_str(&v.to_string());
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn allocation_csv(r: &ExperimentResult) -> String {
    header(r) + &r.allocation.to_tfk_csv()
}

pub fn bandwidth_csv(r: &ExperimentResult) -> String {
    let mut out = header(r);
    out.push_str("t_a,t_b,core,job,demand,share\n");
    for iv in &r.schedule.intervals {
        for sh in &iv.shares {
            let _ = writeln!(out, "{},{},{},{},{},{}", iv.t_a, iv.t_b, sh.core, sh.job, sh.demand, sh.share);
        }
    }
    out
}

/// Paths of the four per-run artifacts.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFiles {
    pub metrics: PathBuf,
    pub schedule: PathBuf,
    pub allocation: PathBuf,
    pub bandwidth: PathBuf,
}

impl RunFiles {
    pub fn in_dir(dir: &Path, r: &ExperimentResult) -> RunFiles {
        let stem = format!("{}_seed{}", r.mode.as_str().to_lowercase(), r.seed);
        RunFiles {
            metrics: dir.join(format!("{stem}_metrics.json")),
            schedule: dir.join(format!("{stem}_schedule.jsonl")),
            allocation: dir.join(format!("{stem}_allocation.csv")),
            bandwidth: dir.join(format!("{stem}_bandwidth.csv")),
        }
    }
}

pub fn write_run(dir: &Path, r: &ExperimentResult, metrics: &Metrics, config: &ExperimentConfig) -> Result<RunFiles> {
    fs::create_dir_all(dir)?;
    let files = RunFiles::in_dir(dir, r);
    fs::write(&files.metrics, metrics_json(metrics, config)?)?;
    fs::write(&files.schedule, schedule_jsonl(r)?)?;
    fs::write(&files.allocation, allocation_csv(r))?;
    fs::write(&files.bandwidth, bandwidth_csv(r))?;
    Ok(files)
}
