use serde::{Deserialize, Serialize};

use crate::workload::OperatorKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub job: usize,
    pub kind: OperatorKind,
    pub slice: Option<usize>,
    pub core: usize,
    pub start_ms: f64,
    pub finish_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoreShare {
    pub core: usize,
    pub job: usize,
    pub demand: f64,
    pub share: f64,
}

/// A stretch `[t_a, t_b)` during which the running set and shares are fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub t_a: f64,
    pub t_b: f64,
    pub shares: Vec<CoreShare>,
}

/// Output of one engine run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleTrace {
    /// Indexed by job id.
    pub jobs: Vec<JobRecord>,
    pub intervals: Vec<Interval>,
    pub cores: usize,
    /// Engine clock at the start of the run.
    pub clock_start_ms: f64,
    pub makespan_ms: f64,
}

impl ScheduleTrace {
    pub fn first_start_ms(&self) -> f64 {
        self.jobs.iter().map(|j| j.start_ms).fold(f64::INFINITY, f64::min)
    }

    /// Job ids per core, ordered by start time.
    pub fn core_sequences(&self) -> Vec<Vec<usize>> {
        let mut seqs = vec![Vec::new(); self.cores];
        for j in &self.jobs {
            seqs[j.core].push(j.job);
        }
        for seq in &mut seqs {
            seq.sort_by(|&a, &b| {
                self.jobs[a]
                    .start_ms
                    .total_cmp(&self.jobs[b].start_ms)
                    .then(a.cmp(&b))
            });
        }
        seqs
    }

    pub fn busy_ms(&self) -> Vec<f64> {
        let mut busy = vec![0.0; self.cores];
        for j in &self.jobs {
            busy[j.core] += j.finish_ms - j.start_ms;
        }
        busy
    }

    /// Integral of the bandwidth share each job received.
    pub fn integrated_share(&self) -> Vec<f64> {
        let mut total = vec![0.0; self.jobs.len()];
        for iv in &self.intervals {
            let dt = iv.t_b - iv.t_a;
            for s in &iv.shares {
                total[s.job] += s.share * dt;
            }
        }
        total
    }
}
