use serde::{Deserialize, Serialize};

use super::trace::RateTrace;

pub const DEFAULT_RATE_FLOOR: f64 = 1e-6;

/// Slot-level mean rate over subcarriers, `[k][t]`.
pub fn slot_mean_rates(trace: &RateTrace) -> Vec<Vec<f64>> {
    let f_count = trace.subcarriers() as f64;
    (0..trace.slices())
        .map(|k| {
            (0..trace.slots())
                .map(|t| (0..trace.subcarriers()).map(|f| trace.rate(k, f, t)).sum::<f64>() / f_count)
                .collect()
        })
        .collect()
}

/// Mean of the remaining slot means from `t` to the horizon, floored at `floor`.
pub fn suffix_mean_predictor(slot_mean: &[Vec<f64>], floor: f64) -> Vec<Vec<f64>> {
    slot_mean
        .iter()
        .map(|row| {
            let n = row.len();
            let mut out = vec![0.0; n];
            let mut acc = 0.0;
            for t in (0..n).rev() {
                acc += row[t];
                out[t] = (acc / (n - t) as f64).max(floor);
            }
            out
        })
        .collect()
}

/// Predicted effective rate per slice and slot (kbit/s, i.e. bits per ms).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePredictor {
    pub slot_mean: Vec<Vec<f64>>,
    pub suffix_mean: Vec<Vec<f64>>,
    pub floor: f64,
}

impl RatePredictor {
    pub fn from_trace(trace: &RateTrace, floor: f64) -> Self {
        let slot_mean = slot_mean_rates(trace);
        let suffix_mean = suffix_mean_predictor(&slot_mean, floor);
        RatePredictor { slot_mean, suffix_mean, floor }
    }

    /// `û_k(t)`.
    #[inline]
    pub fn rate(&self, k: usize, t: usize) -> f64 {
        self.suffix_mean[k][t]
    }

    pub fn at_slot(&self, t: usize) -> Vec<f64> {
        self.suffix_mean.iter().map(|row| row[t]).collect()
    }

    pub fn slots(&self) -> usize {
        self.suffix_mean.first().map_or(0, Vec::len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_means() {
        let tr = RateTrace::from_nested(vec![vec![vec![4000.0], vec![6000.0]]], 1.0).unwrap();
        assert_eq!(slot_mean_rates(&tr), vec![vec![5000.0]]);
        let tr = RateTrace::from_nested(vec![vec![vec![1234.0, 99.0]]], 1.0).unwrap();
        assert_eq!(slot_mean_rates(&tr), vec![vec![1234.0, 99.0]]);
        let tr = RateTrace::from_nested(
            vec![vec![vec![1000.0], vec![2000.0], vec![3000.0], vec![4000.0]]],
            1.0,
        )
        .unwrap();
        assert_eq!(slot_mean_rates(&tr), vec![vec![2500.0]]);
    }

    #[test]
    fn suffix_means() {
        assert_eq!(
            suffix_mean_predictor(&[vec![5000.0; 4]], 1e-6),
            vec![vec![5000.0; 4]]
        );
        assert_eq!(
            suffix_mean_predictor(&[vec![2000.0, 4000.0, 6000.0]], 1e-6),
            vec![vec![4000.0, 5000.0, 6000.0]]
        );
        assert_eq!(suffix_mean_predictor(&[vec![0.0; 3]], 0.5), vec![vec![0.5; 3]]);
    }

    #[test]
    fn suffix_matches_direct_sum_and_last_entry() {
        let row: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64 * 100.0).collect();
        let fast = &suffix_mean_predictor(std::slice::from_ref(&row), 1e-6)[0];
        for t in 0..row.len() {
            let direct = row[t..].iter().sum::<f64>() / (row.len() - t) as f64;
            assert!((fast[t] - direct.max(1e-6)).abs() < 1e-9);
        }
        assert_eq!(fast[49], row[49].max(1e-6));
    }
}
