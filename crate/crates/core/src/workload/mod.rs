//! Multimodal job graph, synthetic profiles and list-scheduling ranks.

mod dag;
mod profile;
mod rank;

pub use dag::{build_multimodal_dag, Dag, Job, OperatorKind};
pub use profile::{
    compute_payloads, core_speeds, generate_profile, BandwidthModel, LatencyModel, OpCost,
    Payload, ProfileTable, WorkloadGenConfig,
};
pub use rank::{upward_ranks, upward_ranks_from_means};
