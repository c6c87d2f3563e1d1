use super::greedy::{allocate_slots, CommPlan, RbChoice};
use crate::channel::{RateTrace, RatePredictor};
use crate::error::Result;

fn max_tail(remaining: impl Iterator<Item = f64>, rates: &[f64]) -> f64 {
    remaining
        .zip(rates)
        .map(|(r, u)| r / u)
        .fold(0.0, f64::max)
}

/// Picks the slice whose trial update minimizes the largest residual
/// transmission time `R_j / û_j`.
///
/// Ties go to the slice with the larger current tail, then the lower index.
pub(crate) fn choose_min_tail(c: &RbChoice<'_>) -> Option<usize> {
    let remaining = c.remaining_all();
    let mut best: Option<(usize, f64, f64)> = None;
    for k in 0..c.slices() {
        if c.is_done(k) {
            continue;
        }
        let trial = c.trial_remaining(k);
        let obj = max_tail(
            remaining.iter().enumerate().map(|(j, &r)| if j == k { trial } else { r }),
            c.rates,
        );
        let tail = remaining[k] / c.rates[k];
        let better = match best {
            None => true,
            Some((_, best_obj, best_tail)) => obj < best_obj || (obj == best_obj && tail > best_tail),
        };
        if better {
            best = Some((k, obj, tail));
        }
    }
    best.map(|(k, _, _)| k)
}

/// Tail-minimizing RB allocation for the transmit-then-compute policy.
///
/// The wait-all start time is [`CommPlan::t_start`].
pub fn rtfs_allocate(
    trace: &RateTrace,
    predictor: &RatePredictor,
    payload_bits: &[f64],
    floor: f64,
) -> Result<CommPlan> {
    allocate_slots(trace, predictor, payload_bits, floor, choose_min_tail)
}
