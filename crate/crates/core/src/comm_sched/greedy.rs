use crate::channel::{release_time, RateTrace, RatePredictor, RbAllocation};
use crate::error::{Error, Result};

/// Allocation emitted by a communication-stage allocator.
#[derive(Debug, Clone, PartialEq)]
pub struct CommPlan {
    pub allocation: RbAllocation,
    pub arrival_slots: Vec<usize>,
    /// End-of-slot release per slice, ms.
    pub release_ms: Vec<f64>,
}

impl CommPlan {
    /// Wait-all start: release of the last slice.
    pub fn t_start(&self) -> f64 {
        self.release_ms.iter().copied().fold(0.0, f64::max)
    }
}

/// View handed to a per-RB selection rule.
pub(crate) struct RbChoice<'a> {
    pub slot: usize,
    pub subcarrier: usize,
    pub now_ms: f64,
    trace: &'a RateTrace,
    delivered: &'a [f64],
    payload: &'a [f64],
    /// `û_k(t)` floored at ε.
    pub rates: &'a [f64],
}

impl RbChoice<'_> {
    pub fn slices(&self) -> usize {
        self.payload.len()
    }

    pub fn remaining(&self, k: usize) -> f64 {
        (self.payload[k] - self.delivered[k]).max(0.0)
    }

    pub fn remaining_all(&self) -> Vec<f64> {
        (0..self.slices()).map(|k| self.remaining(k)).collect()
    }

    pub fn is_done(&self, k: usize) -> bool {
        self.remaining(k) <= 0.0
    }

    /// Remaining bits of `k` if this RB were given to it.
    pub fn trial_remaining(&self, k: usize) -> f64 {
        let bits = self.trace.bits(k, self.subcarrier, self.slot);
        (self.payload[k] - (self.delivered[k] + bits)).max(0.0)
    }
}

/// Walks slots from 0, offering every subcarrier in ascending order to
/// `choose`, until every payload is delivered.
///
/// Progress is tracked as delivered bits accumulated in the same order as
/// [`crate::channel::replay_delivery`], so the recorded arrival slots match
/// a replay of the emitted allocation exactly.
pub(crate) fn allocate_slots<F>(
    trace: &RateTrace,
    predictor: &RatePredictor,
    payload_bits: &[f64],
    floor: f64,
    mut choose: F,
) -> Result<CommPlan>
where
    F: FnMut(&RbChoice<'_>) -> Option<usize>,
{
    let k_count = trace.slices();
    if payload_bits.len() != k_count {
        return Err(Error::config(format!(
            "{} payloads for a {k_count}-slice trace",
            payload_bits.len()
        )));
    }
    if let Some(k) = payload_bits.iter().position(|&d| !(d > 0.0 && d.is_finite())) {
        return Err(Error::config(format!("payload of slice {k} must be positive")));
    }
    if !(floor > 0.0) {
        return Err(Error::config("rate floor must be > 0"));
    }
    if predictor.slots() != trace.slots() || predictor.suffix_mean.len() != k_count {
        return Err(Error::config("rate predictor does not match the trace"));
    }

    let mut allocation = RbAllocation::new(k_count, trace.subcarriers());
    let mut delivered = vec![0.0; k_count];
    let mut arrival: Vec<Option<usize>> = vec![None; k_count];
    let mut rates = vec![0.0; k_count];
    let mut slot = 0;
    while arrival.iter().any(Option::is_none) {
        if slot >= trace.slots() {
            let unfinished = (0..k_count).filter(|&k| arrival[k].is_none()).collect();
            return Err(Error::Infeasible { unfinished, horizon: trace.slots() });
        }
        for (k, r) in rates.iter_mut().enumerate() {
            *r = predictor.rate(k, slot).max(floor);
        }
        let now_ms = slot as f64 * trace.slot_ms();
        for f in 0..trace.subcarriers() {
            let choice = RbChoice {
                slot,
                subcarrier: f,
                now_ms,
                trace,
                delivered: &delivered,
                payload: payload_bits,
                rates: &rates,
            };
            if (0..k_count).all(|k| choice.is_done(k)) {
                break;
            }
            if let Some(k) = choose(&choice) {
                debug_assert!(!choice.is_done(k));
                allocation.assign(k, f, slot)?;
                delivered[k] += trace.bits(k, f, slot);
            }
        }
        for k in 0..k_count {
            if arrival[k].is_none() && delivered[k] >= payload_bits[k] {
                arrival[k] = Some(slot);
            }
        }
        slot += 1;
    }

    let arrival_slots: Vec<usize> = arrival.into_iter().map(Option::unwrap).collect();
    let release_ms = arrival_slots
        .iter()
        .map(|&t| release_time(t, trace.slot_ms()))
        .collect();
    Ok(CommPlan { allocation, arrival_slots, release_ms })
}
