use super::dag::Dag;
use super::profile::ProfileTable;

/// Upward ranks: core-averaged latency plus the largest successor rank.
pub fn upward_ranks(dag: &Dag, profile: &ProfileTable) -> Vec<f64> {
    upward_ranks_from_means(dag, profile.mean_latency())
}

/// Same recursion driven by an explicit mean-latency vector.
pub fn upward_ranks_from_means(dag: &Dag, mean_latency: &[f64]) -> Vec<f64> {
    let mut rank = vec![0.0; dag.len()];
    for &v in dag.topo_order().iter().rev() {
        let tail = dag
            .succs(v)
            .iter()
            .map(|&s| rank[s])
            .fold(0.0, f64::max);
        rank[v] = mean_latency[v] + tail;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use crate::workload::{Job, OperatorKind};

    fn graph(n: usize, edges: Vec<(usize, usize)>) -> Dag {
        let jobs = (0..n).map(|i| Job::cross(i, OperatorKind::Align)).collect();
        Dag::new(jobs, edges, 0).unwrap()
    }

    #[test]
    fn exit_job_rank_is_its_latency() {
        let dag = graph(1, vec![]);
        assert_eq!(upward_ranks_from_means(&dag, &[12.0]), vec![12.0]);
    }

    #[test]
    fn chain() {
        let dag = graph(3, vec![(0, 1), (1, 2)]);
        assert_eq!(upward_ranks_from_means(&dag, &[3.0, 5.0, 7.0]), vec![15.0, 12.0, 7.0]);
    }

    #[test]
    fn diamond() {
        let dag = graph(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        let r = upward_ranks_from_means(&dag, &[1.0, 10.0, 2.0, 4.0]);
        assert_eq!(r, vec![15.0, 14.0, 6.0, 4.0]);
    }

    proptest! {
        #[test]
        fn strictly_decreasing_along_edges(seed in any::<u64>(), cores in 1usize..8, k in 2usize..8) {
            let dag = crate::workload::build_multimodal_dag(k).unwrap();
            let mut cfg = crate::config::ExperimentConfig::default()
                .with_slices((0..k as u32).map(|i| 32 + 64 * i).collect(), vec![0.5; k]);
            cfg.cores = cores;
            cfg.seed = seed;
            let profile = crate::workload::generate_profile(&dag, &cfg.workload()).unwrap();
            let ranks = upward_ranks(&dag, &profile);
            for &(u, v) in dag.edges() {
                prop_assert!(ranks[u] > ranks[v]);
            }
        }
    }
}
