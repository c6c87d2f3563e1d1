//! Co-simulation of multimodal slice delivery over an OFDMA uplink and
//! precedence-constrained job execution on a bandwidth-shared multi-core
//! accelerator.
//!
//! Two policies are provided: a sequential transmit-then-compute scheduler
//! ([`Mode::Rtfs`]) and a pipelined, arrival-gated co-scheduler
//! ([`Mode::Pacs`]).

pub mod channel;
pub mod comm_sched;
pub mod config;
pub mod engine;
pub mod error;
pub mod export;
pub mod orchestrator;
mod rng;
pub mod workload;

pub use channel::{DeliveryResult, RatePredictor, RateTrace, RbAllocation};
pub use comm_sched::{CommPlan, MakespanPrediction};
pub use config::{ExperimentConfig, Mode};
pub use engine::{ScheduleTrace, EngineParams};
pub use error::{Error, Result};
pub use orchestrator::{run_experiment, ExperimentResult, Metrics};
pub use workload::{Dag, Job, OperatorKind, ProfileTable};
