/// Splits the budget among running jobs in proportion to their demands.
///
/// Falls back to an equal split when the total demand is at most `epsilon`.
pub fn bandwidth_shares(demands: &[f64], b_max: f64, epsilon: f64) -> Vec<f64> {
    if demands.is_empty() {
        return Vec::new();
    }
    let total: f64 = demands.iter().sum();
    if total > epsilon {
        demands.iter().map(|b| b / total * b_max).collect()
    } else {
        vec![b_max / demands.len() as f64; demands.len()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solo_runner_gets_everything() {
        assert_eq!(bandwidth_shares(&[0.3], 1.0, 1e-9), vec![1.0]);
        assert_eq!(bandwidth_shares(&[0.7], 2.5, 1e-9), vec![2.5]);
    }

    #[test]
    fn proportional_split() {
        let s = bandwidth_shares(&[0.2, 0.6], 1.0, 1e-9);
        assert!((s[0] - 0.25).abs() < 1e-15 && (s[1] - 0.75).abs() < 1e-15, "{s:?}");
    }

    #[test]
    fn equal_split_and_empty() {
        assert_eq!(bandwidth_shares(&[0.0, 0.0], 1.0, 1e-9), vec![0.5, 0.5]);
        assert!(bandwidth_shares(&[], 1.0, 1e-9).is_empty());
    }
}
