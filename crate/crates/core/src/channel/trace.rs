use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, Stream};

/// Achievable uplink rates in kbit/s per (slice, subcarrier, slot).
///
/// One RB carries `rate * slot_ms` bits in one slot (kbit/s times ms).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTrace {
    slices: usize,
    subcarriers: usize,
    slots: usize,
    slot_ms: f64,
    rates: Vec<f64>,
}

impl RateTrace {
    /// `rates[k][f][t]`.
    pub fn from_nested(rates: Vec<Vec<Vec<f64>>>, slot_ms: f64) -> Result<Self> {
        let slices = rates.len();
        let subcarriers = rates.first().map_or(0, Vec::len);
        let slots = rates.first().and_then(|r| r.first()).map_or(0, Vec::len);
        if slices == 0 || subcarriers == 0 || slots == 0 {
            return Err(Error::config("rate trace dimensions must be nonzero"));
        }
        let mut flat = Vec::with_capacity(slices * subcarriers * slots);
        for per_slice in &rates {
            if per_slice.len() != subcarriers {
                return Err(Error::config("ragged rate trace (subcarriers)"));
            }
            for per_sc in per_slice {
                if per_sc.len() != slots {
                    return Err(Error::config("ragged rate trace (slots)"));
                }
                flat.extend_from_slice(per_sc);
            }
        }
        Self::from_flat(slices, subcarriers, slots, slot_ms, flat)
    }

    fn from_flat(slices: usize, subcarriers: usize, slots: usize, slot_ms: f64, rates: Vec<f64>) -> Result<Self> {
        if !(slot_ms > 0.0) {
            return Err(Error::config("slot duration must be > 0"));
        }
        if let Some(bad) = rates.iter().position(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(Error::config(format!("rate entry {bad} is not positive")));
        }
        Ok(RateTrace { slices, subcarriers, slots, slot_ms, rates })
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn slot_ms(&self) -> f64 {
        self.slot_ms
    }

    #[inline]
    pub fn rate(&self, k: usize, f: usize, t: usize) -> f64 {
        self.rates[(k * self.subcarriers + f) * self.slots + t]
    }

    /// Bits slice `k` sends on subcarrier `f` during slot `t`.
    #[inline]
    pub fn bits(&self, k: usize, f: usize, t: usize) -> f64 {
        self.rate(k, f, t) * self.slot_ms
    }

    /// Restricts the trace to its first `subcarriers` subcarriers.
    pub fn prefix(&self, subcarriers: usize) -> Result<RateTrace> {
        if subcarriers == 0 || subcarriers > self.subcarriers {
            return Err(Error::config(format!(
                "subcarrier prefix {subcarriers} outside 1..={}",
                self.subcarriers
            )));
        }
        let mut rates = Vec::with_capacity(self.slices * subcarriers * self.slots);
        for k in 0..self.slices {
            let start = k * self.subcarriers * self.slots;
            rates.extend_from_slice(&self.rates[start..start + subcarriers * self.slots]);
        }
        Ok(RateTrace { subcarriers, rates, ..*self })
    }

    /// Header `k,f,t,value`, one row per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,f,t,value\n");
        for k in 0..self.slices {
            for f in 0..self.subcarriers {
                for t in 0..self.slots {
                    let _ = writeln!(out, "{k},{f},{t},{}", self.rate(k, f, t));
                }
            }
        }
        out
    }

    pub fn from_csv(text: &str, slot_ms: f64) -> Result<RateTrace> {
        let rows = parse_kft_rows(text)?;
        let dim = |i: usize| rows.iter().map(|r| r.0[i]).max().map_or(0, |m| m + 1);
        let (slices, subcarriers, slots) = (dim(0), dim(1), dim(2));
        let mut rates = vec![f64::NAN; slices * subcarriers * slots];
        for ([k, f, t], value) in rows {
            rates[(k * subcarriers + f) * slots + t] = value;
        }
        if rates.iter().any(|r| r.is_nan()) {
            return Err(Error::config("rate CSV does not cover every (k, f, t) entry"));
        }
        Self::from_flat(slices, subcarriers, slots, slot_ms, rates)
    }
}

pub(crate) fn parse_kft_rows(text: &str) -> Result<Vec<([usize; 3], f64)>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some(h) if h.trim() == "k,f,t,value" => {}
        other => {
            return Err(Error::config(format!("expected header k,f,t,value, found {other:?}")));
        }
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(Error::config(format!("row {}: expected 4 columns", i + 1)));
            }
            let idx = |j: usize| {
                cols[j]
                    .parse::<usize>()
                    .map_err(|e| Error::config(format!("row {}: column {j}: {e}", i + 1)))
            };
            let value = cols[3]
                .parse::<f64>()
                .map_err(|e| Error::config(format!("row {}: value: {e}", i + 1)))?;
            Ok(([idx(0)?, idx(1)?, idx(2)?], value))
        })
        .collect()
}

/// i.i.d. uniform rates in `[lo, hi]` kbit/s.
///
/// Samples are drawn subcarrier-major, so the first `F'` subcarriers of a
/// trace are identical for every requested `F >= F'` under the same seed.
pub fn generate_rate_trace(
    slices: usize,
    subcarriers: usize,
    slots: usize,
    rate_range: (f64, f64),
    slot_ms: f64,
    seed: u64,
) -> Result<RateTrace> {
    let (lo, hi) = rate_range;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::config(format!("rate_range must satisfy 0 < lo <= hi, got [{lo}, {hi}]")));
    }
    if slices == 0 || subcarriers == 0 || slots == 0 {
        return Err(Error::config("rate trace dimensions must be nonzero"));
    }
    let mut rng = stream(seed, Stream::Channel);
    let mut rates = vec![0.0; slices * subcarriers * slots];
    for f in 0..subcarriers {
        for k in 0..slices {
            let base = (k * subcarriers + f) * slots;
            for r in &mut rates[base..base + slots] {
                *r = lo + (hi - lo) * rng.gen::<f64>();
            }
        }
    }
    RateTrace::from_flat(slices, subcarriers, slots, slot_ms, rates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn degenerate_range_is_constant() {
        let tr = generate_rate_trace(2, 3, 10, (5000.0, 5000.0), 1.0, 4).unwrap();
        for k in 0..2 {
            for f in 0..3 {
                for t in 0..10 {
                    assert_eq!(tr.rate(k, f, t), 5000.0);
                    assert_eq!(tr.bits(k, f, t), 5000.0);
                }
            }
        }
    }

    #[test]
    fn default_trace_mean() {
        let tr = generate_rate_trace(6, 16, 8000, (1000.0, 10000.0), 1.0, 11).unwrap();
        let mean = tr.rates.iter().sum::<f64>() / tr.rates.len() as f64;
        assert!((mean - 5500.0).abs() < 0.02 * 5500.0, "mean {mean}");
        assert!(tr.rates.iter().all(|&r| (1000.0..=10000.0).contains(&r)));
    }

    #[test]
    fn deterministic_and_prefix_stable() {
        let a = generate_rate_trace(3, 8, 50, (1000.0, 10000.0), 1.0, 9).unwrap();
        let b = generate_rate_trace(3, 8, 50, (1000.0, 10000.0), 1.0, 9).unwrap();
        assert_eq!(a, b);
        let wide = generate_rate_trace(3, 32, 50, (1000.0, 10000.0), 1.0, 9).unwrap();
        assert_eq!(wide.prefix(8).unwrap(), a);
    }

    #[test]
    fn csv_round_trip() {
        let a = generate_rate_trace(2, 2, 3, (1000.0, 2000.0), 1.0, 1).unwrap();
        let b = RateTrace::from_csv(&a.to_csv(), 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_range() {
        assert!(generate_rate_trace(1, 1, 1, (0.0, 1.0), 1.0, 0).is_err());
        assert!(generate_rate_trace(1, 1, 1, (2.0, 1.0), 1.0, 0).is_err());
    }

    proptest! {
        #[test]
        fn narrow_trace_is_prefix_of_wide(seed in any::<u64>(), narrow in 1usize..8, extra in 1usize..8) {
            let small = generate_rate_trace(2, narrow, 20, (1000.0, 10_000.0), 1.0, seed).unwrap();
            let wide = generate_rate_trace(2, narrow + extra, 20, (1000.0, 10_000.0), 1.0, seed).unwrap();
            prop_assert_eq!(small, wide.prefix(narrow).unwrap());
        }
    }
}
