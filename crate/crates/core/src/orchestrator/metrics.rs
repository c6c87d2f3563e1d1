use serde::Serialize;

use super::pipeline::ExperimentResult;
use crate::config::Mode;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandwidthSample {
    pub t_a: f64,
    pub t_b: f64,
    /// Total share in use over the interval.
    pub used: f64,
}

/// Summary record written as the metrics JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub config_hash: String,
    pub mode: Mode,
    pub seed: u64,
    pub makespan_ms: f64,
    pub t_start_ms: Option<f64>,
    pub comm_ms: f64,
    pub compute_ms: f64,
    pub releases_ms: Vec<f64>,
    pub arrival_slots: Vec<usize>,
    pub utilization: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain_pct: Option<f64>,
    #[serde(skip)]
    pub bandwidth: Vec<BandwidthSample>,
}

pub fn compute_metrics(result: &ExperimentResult) -> Result<Metrics> {
    if !(result.makespan_ms > 0.0) {
        return Err(Error::structural("zero makespan: nothing was executed"));
    }
    let busy = result.schedule.busy_ms();
    let utilization = busy.iter().map(|b| b / result.makespan_ms).collect();
    let bandwidth = result
        .schedule
        .intervals
        .iter()
        .map(|iv| BandwidthSample {
            t_a: iv.t_a,
            t_b: iv.t_b,
            used: iv.shares.iter().map(|s| s.share).sum(),
        })
        .collect();
    Ok(Metrics {
        config_hash: result.config_hash.clone(),
        mode: result.mode,
        seed: result.seed,
        makespan_ms: result.makespan_ms,
        t_start_ms: result.t_start_ms,
        comm_ms: result.comm_ms,
        compute_ms: result.compute_ms,
        releases_ms: result.release_ms.clone(),
        arrival_slots: result.arrival_slots.clone(),
        utilization,
        gain_pct: None,
        bandwidth,
    })
}

/// Relative makespan reduction of PACS over RTFS, in percent.
pub fn gain_pct(rtfs_ms: f64, pacs_ms: f64) -> f64 {
    (rtfs_ms - pacs_ms) / rtfs_ms * 100.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gain_of_reference_row() {
        let g = gain_pct(205.60, 166.39);
        assert!((g - 19.07).abs() < 0.01, "{g}");
        assert_eq!(gain_pct(100.0, 100.0), 0.0);
        assert!(gain_pct(100.0, 110.0) < 0.0);
    }
}
