use super::greedy::{allocate_slots, CommPlan, RbChoice};
use super::predict::{arrival_estimate, predicted_makespan};
use crate::channel::{RateTrace, RatePredictor};
use crate::error::{Error, Result};
use crate::workload::Dag;

/// Gives the RB to the slice with the largest drop in predicted makespan.
///
/// Ties (including the all-zero case) go to the larger estimated arrival,
/// then the lower index.
pub(crate) fn choose_max_gain(
    c: &RbChoice<'_>,
    dag: &Dag,
    mean_latency: &[f64],
    scratch: &mut Vec<f64>,
) -> Option<usize> {
    let mut remaining = c.remaining_all();
    let base = predicted_makespan(c.now_ms, &remaining, c.rates, dag, mean_latency, scratch);
    let mut best: Option<(usize, f64, f64)> = None;
    for k in 0..c.slices() {
        if c.is_done(k) {
            continue;
        }
        let current = remaining[k];
        remaining[k] = c.trial_remaining(k);
        let trial = predicted_makespan(c.now_ms, &remaining, c.rates, dag, mean_latency, scratch);
        remaining[k] = current;
        let gain = base - trial;
        let arrival = arrival_estimate(c.now_ms, current, c.rates[k]);
        let better = match best {
            None => true,
            Some((_, g, a)) => gain > g || (gain == g && arrival > a),
        };
        if better {
            best = Some((k, gain, arrival));
        }
    }
    best.map(|(k, _, _)| k)
}

/// Marginal-gain RB allocation driven by the max-plus makespan predictor.
pub fn pacs_allocate(
    trace: &RateTrace,
    predictor: &RatePredictor,
    payload_bits: &[f64],
    dag: &Dag,
    mean_latency: &[f64],
    floor: f64,
) -> Result<CommPlan> {
    if dag.modality_count() != trace.slices() {
        return Err(Error::config(format!(
            "graph has {} modalities, trace has {} slices",
            dag.modality_count(),
            trace.slices()
        )));
    }
    if mean_latency.len() != dag.len() {
        return Err(Error::config("mean latency vector does not match the graph"));
    }
    let mut scratch = Vec::with_capacity(dag.len());
    allocate_slots(trace, predictor, payload_bits, floor, |c| {
        choose_max_gain(c, dag, mean_latency, &mut scratch)
    })
}
