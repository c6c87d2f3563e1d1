//! Communication-stage RB allocators and the max-plus makespan predictor.

mod greedy;
mod pacs;
mod predict;
mod rtfs;

pub use greedy::CommPlan;
pub use pacs::pacs_allocate;
pub use predict::{arrival_estimate, predict_makespan, MakespanPrediction};
pub use rtfs::rtfs_allocate;
