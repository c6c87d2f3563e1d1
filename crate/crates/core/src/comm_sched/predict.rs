use serde::{Deserialize, Serialize};

use crate::workload::Dag;

/// Contention-free earliest-finish estimate of the whole graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MakespanPrediction {
    /// Estimated slice arrival, ms.
    pub arrival: Vec<f64>,
    /// Release estimate of entry jobs (`None` for jobs with predecessors), ms.
    pub release: Vec<Option<f64>>,
    /// Estimated finish per job, ms.
    pub finish: Vec<f64>,
    pub makespan: f64,
}

/// Arrival estimate `t + R/û`, or `t` once the slice is complete.
///
/// `remaining_bits` in bits and `rate` in kbit/s, which is bits per ms.
#[inline]
pub fn arrival_estimate(now_ms: f64, remaining_bits: f64, rate: f64) -> f64 {
    if remaining_bits <= 0.0 {
        now_ms
    } else {
        now_ms + remaining_bits / rate
    }
}

/// Max-plus recursion over the graph: entry jobs start at their slice's
/// estimated arrival, every other job at the latest predecessor finish.
/// Core contention is ignored.
pub fn predict_makespan(
    now_ms: f64,
    remaining_bits: &[f64],
    rates: &[f64],
    dag: &Dag,
    mean_latency: &[f64],
) -> MakespanPrediction {
    let arrival: Vec<f64> = remaining_bits
        .iter()
        .zip(rates)
        .map(|(&r, &u)| arrival_estimate(now_ms, r, u))
        .collect();
    let mut release = vec![None; dag.len()];
    let mut finish = vec![0.0; dag.len()];
    for &v in dag.topo_order() {
        let preds = dag.preds(v);
        finish[v] = if preds.is_empty() {
            let start = match dag.job(v).slice {
                Some(k) => now_ms.max(arrival[k]),
                None => now_ms,
            };
            release[v] = Some(start);
            start + mean_latency[v]
        } else {
            mean_latency[v] + preds.iter().map(|&u| finish[u]).fold(f64::NEG_INFINITY, f64::max)
        };
    }
    let makespan = finish[dag.output_id()];
    MakespanPrediction { arrival, release, finish, makespan }
}

/// Only the predicted makespan, without the per-job vectors.
pub(crate) fn predicted_makespan(
    now_ms: f64,
    remaining_bits: &[f64],
    rates: &[f64],
    dag: &Dag,
    mean_latency: &[f64],
    scratch: &mut Vec<f64>,
) -> f64 {
    scratch.clear();
    scratch.resize(dag.len(), 0.0);
    for &v in dag.topo_order() {
        let preds = dag.preds(v);
        scratch[v] = if preds.is_empty() {
            let start = match dag.job(v).slice {
                Some(k) => now_ms.max(arrival_estimate(now_ms, remaining_bits[k], rates[k])),
                None => now_ms,
            };
            start + mean_latency[v]
        } else {
            mean_latency[v] + preds.iter().map(|&u| scratch[u]).fold(f64::NEG_INFINITY, f64::max)
        };
    }
    scratch[dag.output_id()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::{Job, OperatorKind};

    #[test]
    fn finished_chain() {
        let jobs = vec![
            Job::slice_local(0, OperatorKind::Embed, 0),
            Job::slice_local(1, OperatorKind::Enc1, 0),
            Job::slice_local(2, OperatorKind::Enc2, 0),
        ];
        let dag = Dag::new(jobs, vec![(0, 1), (1, 2)], 1).unwrap();
        let p = predict_makespan(10.0, &[0.0], &[5000.0], &dag, &[2.0, 3.0, 5.0]);
        assert_eq!(p.arrival, vec![10.0]);
        assert_eq!(p.makespan, 20.0);
        assert_eq!(p.release[0], Some(10.0));
        assert_eq!(p.release[1], None);
    }

    #[test]
    fn zero_remaining_arrives_now() {
        assert_eq!(arrival_estimate(7.25, 0.0, 1.0), 7.25);
        assert_eq!(arrival_estimate(7.25, -3.0, 1.0), 7.25);
        assert_eq!(arrival_estimate(1.0, 100.0, 50.0), 3.0);
    }

    #[test]
    fn fast_path_agrees() {
        let dag = crate::workload::build_multimodal_dag(4).unwrap();
        let lat: Vec<f64> = (0..dag.len()).map(|i| 1.0 + i as f64 * 0.5).collect();
        let rem = [100.0, 0.0, 5000.0, 250.0];
        let rates = [10.0, 20.0, 30.0, 40.0];
        let full = predict_makespan(3.0, &rem, &rates, &dag, &lat);
        let mut scratch = Vec::new();
        assert_eq!(predicted_makespan(3.0, &rem, &rates, &dag, &lat, &mut scratch), full.makespan);
    }
}
