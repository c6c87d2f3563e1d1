use serde::{Deserialize, Serialize};

use super::allocation::RbAllocation;
use super::trace::RateTrace;
use crate::error::{Error, Result};

/// Outcome of replaying an allocation against a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeliveryResult {
    /// Bits received by the end of each slot, `[k][t]`.
    pub cumulative_bits: Vec<Vec<f64>>,
    /// First slot whose end completes the slice, if any.
    pub arrival_slot: Vec<Option<usize>>,
    /// End of the arrival slot in ms.
    pub release_ms: Vec<Option<f64>>,
}

impl DeliveryResult {
    pub fn unfinished(&self) -> Vec<usize> {
        (0..self.arrival_slot.len())
            .filter(|&k| self.arrival_slot[k].is_none())
            .collect()
    }

    /// Arrival slots of a complete delivery, or [`Error::Infeasible`].
    pub fn require_complete(&self) -> Result<Vec<usize>> {
        let unfinished = self.unfinished();
        if !unfinished.is_empty() {
            let horizon = self.cumulative_bits.first().map_or(0, Vec::len);
            return Err(Error::Infeasible { unfinished, horizon });
        }
        Ok(self.arrival_slot.iter().map(|a| a.unwrap()).collect())
    }
}

/// Release time under end-of-slot semantics: a slice completed during slot
/// `t` is available at `(t + 1) * slot_ms`.
pub fn release_time(arrival_slot: usize, slot_ms: f64) -> f64 {
    (arrival_slot + 1) as f64 * slot_ms
}

/// Accumulates delivered bits slot by slot (subcarriers in ascending order)
/// and finds each slice's arrival slot. Bits beyond the payload in the
/// final slot are discarded.
pub fn replay_delivery(trace: &RateTrace, allocation: &RbAllocation, payload_bits: &[f64]) -> Result<DeliveryResult> {
    let k_count = trace.slices();
    if allocation.slices() != k_count || payload_bits.len() != k_count {
        return Err(Error::config(format!(
            "dimension mismatch: trace has {k_count} slices, allocation {}, payloads {}",
            allocation.slices(),
            payload_bits.len()
        )));
    }
    if allocation.subcarriers() != trace.subcarriers() {
        return Err(Error::config("allocation and trace disagree on subcarrier count"));
    }
    if allocation.slots_used() > trace.slots() {
        return Err(Error::config("allocation extends beyond the trace horizon"));
    }

    let slots = trace.slots();
    let mut cumulative = vec![vec![0.0; slots]; k_count];
    let mut arrival = vec![None; k_count];
    let mut running = vec![0.0; k_count];
    for t in 0..slots {
        for f in 0..trace.subcarriers() {
            if let Some(k) = allocation.owner(f, t) {
                running[k] += trace.bits(k, f, t);
            }
        }
        for k in 0..k_count {
            cumulative[k][t] = running[k];
            if arrival[k].is_none() && running[k] >= payload_bits[k] {
                arrival[k] = Some(t);
            }
        }
    }
    let release_ms = arrival
        .iter()
        .map(|a| a.map(|t| release_time(t, trace.slot_ms())))
        .collect();
    Ok(DeliveryResult { cumulative_bits: cumulative, arrival_slot: arrival, release_ms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use crate::channel::generate_rate_trace;

    fn constant(k: usize, f: usize, t: usize, rate: f64) -> RateTrace {
        RateTrace::from_nested(vec![vec![vec![rate; t]; f]; k], 1.0).unwrap()
    }

    #[test]
    fn every_slot_one_rb() {
        let tr = constant(1, 1, 5, 2000.0);
        let mut x = RbAllocation::new(1, 1);
        for t in 0..5 {
            x.assign(0, 0, t).unwrap();
        }
        let d = replay_delivery(&tr, &x, &[10_000.0]).unwrap();
        assert_eq!(d.cumulative_bits[0], vec![2000.0, 4000.0, 6000.0, 8000.0, 10000.0]);
        assert_eq!(d.arrival_slot, vec![Some(4)]);
        assert_eq!(d.release_ms, vec![Some(5.0)]);
    }

    #[test]
    fn overshoot_in_final_slot() {
        let tr = constant(1, 1, 2, 2000.0);
        let mut x = RbAllocation::new(1, 1);
        x.assign(0, 0, 0).unwrap();
        x.assign(0, 0, 1).unwrap();
        let d = replay_delivery(&tr, &x, &[3000.0]).unwrap();
        assert_eq!(d.arrival_slot, vec![Some(1)]);
        assert_eq!(d.release_ms, vec![Some(2.0)]);
    }

    #[test]
    fn unserved_slice_is_infeasible() {
        let tr = constant(2, 1, 3, 2000.0);
        let mut x = RbAllocation::new(2, 1);
        x.assign(0, 0, 0).unwrap();
        let d = replay_delivery(&tr, &x, &[1000.0, 1000.0]).unwrap();
        assert_eq!(d.arrival_slot, vec![Some(0), None]);
        assert_eq!(d.release_ms[1], None);
        assert_eq!(
            d.require_complete(),
            Err(Error::Infeasible { unfinished: vec![1], horizon: 3 })
        );
    }

    #[test]
    fn dimension_mismatch() {
        let tr = constant(2, 1, 3, 2000.0);
        assert!(replay_delivery(&tr, &RbAllocation::new(1, 1), &[1.0]).is_err());
        assert!(replay_delivery(&tr, &RbAllocation::new(2, 2), &[1.0, 1.0]).is_err());
    }

    /// Random exclusive allocation; also returns the RBs left free.
    fn random_allocation(trace: &RateTrace, seed: u64, density: f64) -> (RbAllocation, Vec<(usize, usize)>) {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut alloc = RbAllocation::new(trace.slices(), trace.subcarriers());
        let mut free = Vec::new();
        for t in 0..trace.slots() {
            for f in 0..trace.subcarriers() {
                if r.gen_bool(density) {
                    alloc.assign(r.gen_range(0..trace.slices()), f, t).unwrap();
                } else {
                    free.push((t, f));
                }
            }
        }
        (alloc, free)
    }

    proptest! {
        #[test]
        fn cumulative_bits_are_conserved(seed in any::<u64>(), density in 0.0f64..1.0) {
            let trace = generate_rate_trace(3, 4, 30, (1000.0, 10_000.0), 1.0, seed).unwrap();
            let (alloc, _) = random_allocation(&trace, seed, density);
            let replay = replay_delivery(&trace, &alloc, &[f64::INFINITY; 3]).unwrap();
            for k in 0..3 {
                let direct: f64 = alloc
                    .assignments()
                    .filter(|&(_, _, owner)| owner == k)
                    .map(|(t, f, _)| trace.bits(k, f, t))
                    .sum();
                let total = *replay.cumulative_bits[k].last().unwrap();
                prop_assert!((total - direct).abs() <= 1e-9 * direct.max(1.0));
            }
        }

        #[test]
        fn extra_rb_never_delays_arrival(seed in any::<u64>(), density in 0.1f64..0.9) {
            let trace = generate_rate_trace(3, 4, 30, (1000.0, 10_000.0), 1.0, seed).unwrap();
            let (alloc, free) = random_allocation(&trace, seed, density);
            let payload = [60_000.0, 80_000.0, 40_000.0];
            let before = replay_delivery(&trace, &alloc, &payload).unwrap();
            for (i, &(t, f)) in free.iter().enumerate().take(12) {
                let k = i % 3;
                let mut more = alloc.clone();
                more.assign(k, f, t).unwrap();
                let after = replay_delivery(&trace, &more, &payload).unwrap();
                if let Some(b) = before.arrival_slot[k] {
                    prop_assert!(after.arrival_slot[k].is_some_and(|a| a <= b));
                }
            }
        }
    }
}
