use serde::Serialize;

use crate::channel::{generate_rate_trace, replay_delivery, RatePredictor, RateTrace, RbAllocation};
use crate::comm_sched::{pacs_allocate, rtfs_allocate, CommPlan};
use crate::config::{ExperimentConfig, Mode};
use crate::engine::{run_gated, run_waitall, EngineParams, ScheduleTrace};
use crate::error::{Error, Result};
use crate::workload::{
    build_multimodal_dag, compute_payloads, generate_profile, upward_ranks, Dag, Payload,
    ProfileTable,
};

/// Everything derived from a config before any scheduling decision.
///
/// Both policies of a paired comparison run on the same scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ExperimentConfig,
    pub dag: Dag,
    pub profile: ProfileTable,
    pub ranks: Vec<f64>,
    pub payloads: Vec<Payload>,
    pub trace: RateTrace,
    pub predictor: RatePredictor,
}

impl Scenario {
    pub fn prepare(cfg: &ExperimentConfig) -> Result<Scenario> {
        cfg.validate()?;
        let workload = cfg.workload();
        let dag = build_multimodal_dag(cfg.modalities)?;
        let profile = generate_profile(&dag, &workload)?;
        let ranks = upward_ranks(&dag, &profile);
        let payloads = compute_payloads(&workload)?;
        // Subcarrier-major sampling: a trace for F is the F-prefix of any wider one.
        let trace = generate_rate_trace(
            cfg.modalities,
            cfg.subcarriers,
            cfg.horizon_slots,
            (cfg.rate_range[0], cfg.rate_range[1]),
            cfg.slot_ms,
            cfg.seed,
        )?;
        let predictor = RatePredictor::from_trace(&trace, cfg.rate_floor);
        Ok(Scenario { config: cfg.clone(), dag, profile, ranks, payloads, trace, predictor })
    }

    pub fn payload_bits(&self) -> Vec<f64> {
        self.payloads.iter().map(Payload::bits).collect()
    }

    pub fn engine_params(&self) -> EngineParams {
        EngineParams { b_max: self.config.b_max, epsilon: self.config.engine_epsilon }
    }
}

/// How the compute stage consumes the communication plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Execution {
    /// Start every job no earlier than `t_start`.
    WaitAll { t_start: f64 },
    /// Gate each slice's entry job at its own release.
    Gated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerOutput {
    pub plan: CommPlan,
    /// Per-slice gate times, ms.
    pub gates: Vec<f64>,
    pub execution: Execution,
}

/// A joint communication/computation decision procedure.
///
/// Implementations see the whole scenario and return an RB allocation plus
/// the gates the compute engine must honour.
pub trait Optimizer {
    fn mode(&self) -> Mode;
    fn optimize(&self, scenario: &Scenario) -> Result<OptimizerOutput>;
}

pub struct Rtfs;

impl Optimizer for Rtfs {
    fn mode(&self) -> Mode {
        Mode::Rtfs
    }

    fn optimize(&self, s: &Scenario) -> Result<OptimizerOutput> {
        let plan = rtfs_allocate(&s.trace, &s.predictor, &s.payload_bits(), s.config.rate_floor)?;
        let t_start = plan.t_start();
        Ok(OptimizerOutput {
            gates: plan.release_ms.clone(),
            plan,
            execution: Execution::WaitAll { t_start },
        })
    }
}

pub struct Pacs;

impl Optimizer for Pacs {
    fn mode(&self) -> Mode {
        Mode::Pacs
    }

    fn optimize(&self, s: &Scenario) -> Result<OptimizerOutput> {
        let plan = pacs_allocate(
            &s.trace,
            &s.predictor,
            &s.payload_bits(),
            &s.dag,
            s.profile.mean_latency(),
            s.config.rate_floor,
        )?;
        Ok(OptimizerOutput { gates: plan.release_ms.clone(), plan, execution: Execution::Gated })
    }
}

pub fn optimizer_for(mode: Mode) -> Box<dyn Optimizer + Send + Sync> {
    match mode {
        Mode::Rtfs => Box::new(Rtfs),
        Mode::Pacs => Box::new(Pacs),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub mode: Mode,
    pub seed: u64,
    pub config_hash: String,
    pub makespan_ms: f64,
    pub arrival_slots: Vec<usize>,
    pub release_ms: Vec<f64>,
    /// Wait-all start, RTFS only.
    pub t_start_ms: Option<f64>,
    /// Time until the last slice is released.
    pub comm_ms: f64,
    /// Makespan beyond the last release.
    pub compute_ms: f64,
    /// Busy time over makespan, per core.
    pub utilization: Vec<f64>,
    pub schedule: ScheduleTrace,
    pub allocation: RbAllocation,
}

/// Runs one optimizer on a prepared scenario and simulates its execution.
pub fn run_with(scenario: &Scenario, optimizer: &dyn Optimizer) -> Result<ExperimentResult> {
    let out = optimizer.optimize(scenario)?;

    let replay = replay_delivery(&scenario.trace, &out.plan.allocation, &scenario.payload_bits())?;
    let replayed = replay.require_complete()?;
    if replayed != out.plan.arrival_slots {
        return Err(Error::structural(format!(
            "allocator recorded arrivals {:?} but replay gives {replayed:?}",
            out.plan.arrival_slots
        )));
    }

    let params = scenario.engine_params();
    let (schedule, t_start) = match out.execution {
        Execution::WaitAll { t_start } => (
            run_waitall(&scenario.dag, &scenario.profile, &scenario.ranks, t_start, &out.gates, params)?,
            Some(t_start),
        ),
        Execution::Gated => (
            run_gated(&scenario.dag, &scenario.profile, &scenario.ranks, &out.gates, params)?,
            None,
        ),
    };

    let makespan_ms = schedule.makespan_ms;
    let last_release = out.plan.release_ms.iter().copied().fold(0.0, f64::max);
    let comm_ms = t_start.unwrap_or(last_release);
    let utilization = if makespan_ms > 0.0 {
        schedule.busy_ms().iter().map(|b| b / makespan_ms).collect()
    } else {
        vec![0.0; schedule.cores]
    };
    Ok(ExperimentResult {
        mode: optimizer.mode(),
        seed: scenario.config.seed,
        config_hash: scenario.config.config_hash(),
        makespan_ms,
        arrival_slots: out.plan.arrival_slots,
        release_ms: out.plan.release_ms,
        t_start_ms: t_start,
        comm_ms,
        compute_ms: makespan_ms - comm_ms,
        utilization,
        schedule,
        allocation: out.plan.allocation,
    })
}

/// Prepares the scenario for `cfg` and runs the policy named by `cfg.mode`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let scenario = Scenario::prepare(cfg)?;
    run_with(&scenario, optimizer_for(cfg.mode).as_ref())
}

/// Both policies on one scenario, RTFS first.
pub fn run_paired(cfg: &ExperimentConfig) -> Result<(ExperimentResult, ExperimentResult)> {
    let scenario = Scenario::prepare(cfg)?;
    Ok((run_with(&scenario, &Rtfs)?, run_with(&scenario, &Pacs)?))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::engine::check_schedule;

    fn config(seed: u64, k: usize, cores: usize, subcarriers: usize) -> ExperimentConfig {
        let tokens = (0..k as u32).map(|i| 32 + (seed as u32 % 97 + 61 * i) % 480).collect();
        let mut cfg = ExperimentConfig::default().with_slices(tokens, vec![0.5; k]);
        cfg.cores = cores;
        cfg.subcarriers = subcarriers;
        cfg.horizon_slots = 2000;
        cfg.seed = seed;
        cfg
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn both_policies_respect_their_execution_contract(
            seed in any::<u64>(), k in 2usize..7, cores in 1usize..6, f in 4usize..20,
        ) {
            let s = Scenario::prepare(&config(seed, k, cores, f)).unwrap();
            let r = run_with(&s, &Rtfs).unwrap();
            let p = run_with(&s, &Pacs).unwrap();
            let last = r.release_ms.iter().copied().fold(0.0, f64::max);
            prop_assert_eq!(r.t_start_ms, Some(last));
            prop_assert!(r.schedule.first_start_ms() >= last);
            prop_assert!((r.comm_ms + r.compute_ms - r.makespan_ms).abs() <= 1e-9);
            prop_assert_eq!(p.t_start_ms, None);
            for res in [&r, &p] {
                check_schedule(&res.schedule, &s.dag, &s.profile, &s.ranks, &res.release_ms, s.config.b_max)
                    .map_err(TestCaseError::fail)?;
            }
        }
    }

    #[test]
    fn paired_runs_share_the_scenario() {
        let cfg = config(3, 4, 2, 8);
        let (r, p) = run_paired(&cfg).unwrap();
        let s = Scenario::prepare(&cfg).unwrap();
        assert_eq!(r, run_with(&s, &Rtfs).unwrap());
        assert_eq!(p, run_with(&s, &Pacs).unwrap());
    }
}
