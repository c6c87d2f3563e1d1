//! Shared fixtures for integration tests: random instances and an
//! independent fixed-step reference simulator.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use winp_core::{Dag, ExperimentConfig, Job, OperatorKind, ProfileTable};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small random graph with execution profile and slice gates.
pub struct Instance {
    pub dag: Dag,
    pub profile: ProfileTable,
    pub gates: Vec<f64>,
    pub b_max: f64,
}

/// Random graph of `2..=max_jobs` jobs on `1..=max_cores` cores.
///
/// The first `K` jobs are slice entries (Embed), the last one is the single
/// sink, everything in between draws 1..=3 earlier predecessors.
pub fn random_instance(seed: u64, max_jobs: usize, max_cores: usize) -> Instance {
    let mut r = rng(seed);
    let n = r.gen_range(3..=max_jobs);
    let k = r.gen_range(1..=3usize.min(n - 1));
    let cores = r.gen_range(1..=max_cores);

    let mut jobs: Vec<Job> = (0..k).map(|s| Job::slice_local(s, OperatorKind::Embed, s)).collect();
    let mut edges = Vec::new();
    for v in k..n - 1 {
        if r.gen_bool(0.5) {
            jobs.push(Job::slice_local(v, OperatorKind::Enc1, r.gen_range(0..k)));
        } else {
            jobs.push(Job::cross(v, OperatorKind::Align));
        }
        let fan = r.gen_range(1..=3usize.min(v));
        let mut preds: Vec<usize> = Vec::new();
        while preds.len() < fan {
            let u = r.gen_range(0..v);
            if !preds.contains(&u) {
                preds.push(u);
            }
        }
        preds.sort_unstable();
        edges.extend(preds.into_iter().map(|u| (u, v)));
    }
    let sink = n - 1;
    jobs.push(Job::cross(sink, OperatorKind::Output));
    for u in 0..sink {
        if !edges.iter().any(|&(a, _)| a == u) {
            edges.push((u, sink));
        }
    }
    let dag = Dag::new(jobs, edges, k).expect("generated graph is valid");

    let latency: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..cores).map(|_| r.gen_range(0.5..10.0)).collect())
        .collect();
    let demand: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..cores).map(|_| r.gen_range(0.2..=1.0)).collect())
        .collect();
    let profile = ProfileTable::new(latency, demand).expect("profile is valid");
    let gates = (0..k)
        .map(|_| if r.gen_bool(0.3) { 0.0 } else { r.gen_range(0.0..20.0) })
        .collect();
    let b_max = r.gen_range(0.5..2.0);
    Instance { dag, profile, gates, b_max }
}

/// A random, small but well-formed experiment configuration.
pub fn random_config(seed: u64) -> ExperimentConfig {
    let mut r = rng(seed ^ 0x5eed_cafe);
    let k = r.gen_range(2..=6);
    let tokens: Vec<u32> = (0..k).map(|_| r.gen_range(16..=512)).collect();
    let compression: Vec<f64> = (0..k).map(|_| [0.25, 0.5, 0.6, 0.8, 1.0][r.gen_range(0..5)]).collect();
    let mut cfg = ExperimentConfig::default().with_slices(tokens, compression);
    cfg.cores = r.gen_range(1..=8);
    cfg.subcarriers = r.gen_range(4..=24);
    cfg.b_max = r.gen_range(0.5..2.0);
    cfg.horizon_slots = 2000;
    cfg.seed = seed;
    cfg
}

/// Upward ranks from first principles: memoised recursion over successors.
pub fn reference_ranks(dag: &Dag, profile: &ProfileTable) -> Vec<f64> {
    fn rank(v: usize, dag: &Dag, mean: &[f64], memo: &mut [Option<f64>]) -> f64 {
        if let Some(x) = memo[v] {
            return x;
        }
        let tail = dag
            .succs(v)
            .iter()
            .map(|&s| rank(s, dag, mean, memo))
            .fold(0.0, f64::max);
        let x = mean[v] + tail;
        memo[v] = Some(x);
        x
    }
    let mean: Vec<f64> = (0..dag.len())
        .map(|v| {
            let row: Vec<f64> = (0..profile.core_count()).map(|c| profile.latency(v, c)).collect();
            row.iter().sum::<f64>() / row.len() as f64
        })
        .collect();
    let mut memo = vec![None; dag.len()];
    (0..dag.len()).map(|v| rank(v, dag, &mean, &mut memo)).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct RefRecord {
    pub core: usize,
    pub start: f64,
    pub finish: f64,
}

/// Fixed-step simulation with step `h`.
///
/// Shares are recomputed every step. Completions and gate openings that
/// fall inside a step are located exactly and the step is split there, so
/// dispatch happens at the true event instant rather than the next grid
/// point.
pub fn reference_simulate(
    dag: &Dag,
    profile: &ProfileTable,
    gates: &[f64],
    b_max: f64,
    clock: f64,
    h: f64,
) -> Vec<RefRecord> {
    const EPS: f64 = 1e-9;
    let n = dag.len();
    let cores = profile.core_count();
    let ranks = reference_ranks(dag, profile);
    let mean: Vec<f64> = (0..n)
        .map(|v| (0..cores).map(|c| profile.latency(v, c)).sum::<f64>() / cores as f64)
        .collect();

    let mut done = vec![false; n];
    let mut started = vec![false; n];
    let mut out = vec![RefRecord { core: usize::MAX, start: f64::NAN, finish: f64::NAN }; n];
    let mut on_core: Vec<Option<(usize, f64)>> = vec![None; cores];
    let mut t = clock;
    let mut grid = clock + h;
    let mut remaining = n;
    let mut event = true;

    while remaining > 0 {
        // Dispatch: best-priority ready job onto each idle core in index order.
        for c in 0..cores {
            if !event || on_core[c].is_some() {
                continue;
            }
            let best = (0..n)
                .filter(|&v| !started[v] && dag.preds(v).iter().all(|&u| done[u]))
                .filter(|&v| match (dag.job(v).kind, dag.job(v).slice) {
                    (OperatorKind::Embed, Some(k)) => t + EPS >= gates[k],
                    _ => true,
                })
                .min_by(|&a, &b| {
                    ranks[b]
                        .partial_cmp(&ranks[a])
                        .unwrap()
                        .then(mean[a].partial_cmp(&mean[b]).unwrap())
                        .then(a.cmp(&b))
                });
            if let Some(v) = best {
                started[v] = true;
                out[v].core = c;
                out[v].start = t;
                on_core[c] = Some((v, profile.latency(v, c) * profile.demand(v, c)));
            }
        }

        let total: f64 = (0..cores)
            .filter_map(|c| on_core[c].map(|(v, _)| profile.demand(v, c)))
            .sum();
        let share = |c: usize, v: usize| profile.demand(v, c) / total * b_max;

        let mut dt = grid - t;
        for c in 0..cores {
            if let Some((v, w)) = on_core[c] {
                dt = dt.min(w / share(c, v));
            }
        }
        let mut gate_hit = false;
        for &g in gates {
            if g > t + EPS && g - t <= dt {
                dt = g - t;
                gate_hit = true;
            }
        }
        assert!(dt.is_finite() && dt >= 0.0, "reference stalled at t={t}");
        event = gate_hit;

        for c in 0..cores {
            if let Some((v, w)) = on_core[c] {
                let left = w - share(c, v) * dt;
                if left <= EPS {
                    out[v].finish = t + dt;
                    done[v] = true;
                    remaining -= 1;
                    on_core[c] = None;
                    event = true;
                } else {
                    on_core[c] = Some((v, left));
                }
            }
        }
        t += dt;
        if t >= grid - 1e-15 {
            grid += h;
        }
    }
    out
}
