use std::cmp::Ordering;

use super::share::bandwidth_shares;
use super::trace::{CoreShare, Interval, JobRecord, ScheduleTrace};
use crate::error::{Error, Result};
use crate::workload::{Dag, OperatorKind, ProfileTable};

/// Budget and numerical threshold of the engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineParams {
    /// Normalized NoC budget shared by running jobs.
    pub b_max: f64,
    /// Completion threshold on remaining work, and gate slack.
    pub epsilon: f64,
}

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams { b_max: 1.0, epsilon: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Unscheduled,
    Ready,
    Running,
    Finished,
}

struct Engine<'a> {
    dag: &'a Dag,
    profile: &'a ProfileTable,
    ranks: &'a [f64],
    gates: &'a [f64],
    params: EngineParams,
    now: f64,
    status: Vec<Status>,
    ready: Vec<usize>,
    running: Vec<Option<usize>>,
    remaining_work: Vec<f64>,
    start: Vec<f64>,
    finish: Vec<f64>,
    core_of: Vec<usize>,
    finished: usize,
    intervals: Vec<Interval>,
}

impl<'a> Engine<'a> {
    fn new(
        dag: &'a Dag,
        profile: &'a ProfileTable,
        ranks: &'a [f64],
        gates: &'a [f64],
        params: EngineParams,
        clock: f64,
    ) -> Result<Self> {
        let n = dag.len();
        if profile.job_count() != n || ranks.len() != n {
            return Err(Error::config("profile or ranks do not match the graph"));
        }
        if gates.len() != dag.modality_count() {
            return Err(Error::config(format!(
                "{} gates for {} slices",
                gates.len(),
                dag.modality_count()
            )));
        }
        if let Some(k) = gates.iter().position(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::config(format!("gate of slice {k} must be finite and >= 0")));
        }
        if !(params.b_max > 0.0) || !(params.epsilon > 0.0) {
            return Err(Error::config("b_max and epsilon must be > 0"));
        }
        let cores = profile.core_count();
        let mut engine = Engine {
            dag,
            profile,
            ranks,
            gates,
            params,
            now: clock,
            status: vec![Status::Unscheduled; n],
            ready: Vec::new(),
            running: vec![None; cores],
            remaining_work: vec![0.0; cores],
            start: vec![f64::NAN; n],
            finish: vec![f64::NAN; n],
            core_of: vec![usize::MAX; n],
            finished: 0,
            intervals: Vec::new(),
        };
        engine.release_ready();
        Ok(engine)
    }

    fn gate_open(&self, v: usize) -> bool {
        let job = self.dag.job(v);
        match (job.kind, job.slice) {
            (OperatorKind::Embed, Some(k)) => self.now + self.params.epsilon >= self.gates[k],
            _ => true,
        }
    }

    fn release_ready(&mut self) {
        for v in 0..self.dag.len() {
            if self.status[v] == Status::Unscheduled
                && self.dag.preds(v).iter().all(|&u| self.status[u] == Status::Finished)
                && self.gate_open(v)
            {
                self.status[v] = Status::Ready;
                self.ready.push(v);
            }
        }
    }

    /// Larger rank first, then smaller mean latency, then lower id.
    fn priority(&self, a: usize, b: usize) -> Ordering {
        let mean = self.profile.mean_latency();
        self.ranks[b]
            .total_cmp(&self.ranks[a])
            .then(mean[a].total_cmp(&mean[b]))
            .then(a.cmp(&b))
    }

    fn dispatch(&mut self) {
        for c in 0..self.running.len() {
            if self.running[c].is_some() {
                continue;
            }
            let Some(pos) = (0..self.ready.len())
                .min_by(|&i, &j| self.priority(self.ready[i], self.ready[j]))
            else {
                break;
            };
            let v = self.ready.swap_remove(pos);
            self.status[v] = Status::Running;
            self.start[v] = self.now;
            self.core_of[v] = c;
            self.running[c] = Some(v);
            self.remaining_work[c] = self.profile.work(v, c);
        }
    }

    fn next_gate(&self) -> f64 {
        self.gates
            .iter()
            .copied()
            .filter(|&g| g > self.now + self.params.epsilon)
            .fold(f64::INFINITY, f64::min)
    }

    fn unfinished(&self) -> Vec<usize> {
        (0..self.dag.len())
            .filter(|&v| self.status[v] != Status::Finished)
            .collect()
    }

    /// Advances to the next completion or gate. Returns the step length.
    fn step(&mut self) -> Result<f64> {
        let run: Vec<usize> = (0..self.running.len())
            .filter(|&c| self.running[c].is_some())
            .collect();
        let demands: Vec<f64> = run
            .iter()
            .map(|&c| self.profile.demand(self.running[c].unwrap(), c))
            .collect();
        let alpha = bandwidth_shares(&demands, self.params.b_max, self.params.epsilon);

        let to_finish: Vec<f64> = run
            .iter()
            .zip(&alpha)
            .map(|(&c, &a)| self.remaining_work[c] / a)
            .collect();
        let delta_comp = to_finish.iter().copied().fold(f64::INFINITY, f64::min);
        let t_gate = self.next_gate();

        let (delta, completes) = if delta_comp.is_finite() && self.now + delta_comp <= t_gate {
            (delta_comp, true)
        } else if t_gate.is_finite() {
            (t_gate - self.now, false)
        } else {
            return Err(Error::structural(format!(
                "deadlock at t={} ms: no runnable job, no pending gate; unfinished jobs {:?}",
                self.now,
                self.unfinished()
            )));
        };

        if delta > 0.0 && !run.is_empty() {
            self.intervals.push(Interval {
                t_a: self.now,
                t_b: self.now + delta,
                shares: run
                    .iter()
                    .zip(&alpha)
                    .zip(&demands)
                    .map(|((&c, &share), &demand)| CoreShare {
                        core: c,
                        job: self.running[c].unwrap(),
                        demand,
                        share,
                    })
                    .collect(),
            });
        }
        for (i, &c) in run.iter().enumerate() {
            if completes && to_finish[i] == delta_comp {
                self.remaining_work[c] = 0.0;
            } else {
                self.remaining_work[c] -= alpha[i] * delta;
            }
        }
        self.now = if completes { self.now + delta_comp } else { t_gate };

        for &c in &run {
            if self.remaining_work[c] <= self.params.epsilon {
                let v = self.running[c].take().unwrap();
                self.remaining_work[c] = 0.0;
                self.finish[v] = self.now;
                self.status[v] = Status::Finished;
                self.finished += 1;
            }
        }
        self.release_ready();
        Ok(delta)
    }

    fn run(mut self) -> Result<ScheduleTrace> {
        let clock_start = self.now;
        let n = self.dag.len();
        let cap = 10 * n;
        let mut zero_steps = 0;
        while self.finished < n {
            self.dispatch();
            let delta = self.step()?;
            if delta > 0.0 {
                zero_steps = 0;
            } else {
                zero_steps += 1;
                if zero_steps > cap {
                    return Err(Error::structural(format!(
                        "livelock at t={} ms: {cap} zero-length steps",
                        self.now
                    )));
                }
            }
        }
        let jobs: Vec<JobRecord> = self
            .dag
            .jobs()
            .iter()
            .map(|j| JobRecord {
                job: j.id,
                kind: j.kind,
                slice: j.slice,
                core: self.core_of[j.id],
                start_ms: self.start[j.id],
                finish_ms: self.finish[j.id],
            })
            .collect();
        let makespan_ms = jobs.iter().map(|j| j.finish_ms).fold(f64::NEG_INFINITY, f64::max);
        Ok(ScheduleTrace {
            jobs,
            intervals: self.intervals,
            cores: self.running.len(),
            clock_start_ms: clock_start,
            makespan_ms,
        })
    }
}

/// Wait-all execution: the clock starts at `t_start`, by which every slice
/// has been released (`t_start >= max(gates)`).
pub fn run_waitall(
    dag: &Dag,
    profile: &ProfileTable,
    ranks: &[f64],
    t_start: f64,
    gates: &[f64],
    params: EngineParams,
) -> Result<ScheduleTrace> {
    if let Some(k) = gates.iter().position(|&g| g > t_start) {
        return Err(Error::config(format!(
            "wait-all start {t_start} ms precedes release of slice {k} at {} ms",
            gates[k]
        )));
    }
    Engine::new(dag, profile, ranks, gates, params, t_start)?.run()
}

/// Slice-gated execution: each slice's Embed job becomes ready once the
/// clock reaches its gate, and the clock also stops at every gate.
pub fn run_gated(
    dag: &Dag,
    profile: &ProfileTable,
    ranks: &[f64],
    gates: &[f64],
    params: EngineParams,
) -> Result<ScheduleTrace> {
    Engine::new(dag, profile, ranks, gates, params, 0.0)?.run()
}
