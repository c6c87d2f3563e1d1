//! OFDMA uplink: rate traces, rate predictors, RB allocations and delivery replay.

mod allocation;
mod delivery;
mod predictor;
mod trace;

pub use allocation::RbAllocation;
pub use delivery::{release_time, replay_delivery, DeliveryResult};
pub use predictor::{slot_mean_rates, suffix_mean_predictor, RatePredictor, DEFAULT_RATE_FLOOR};
pub use trace::{generate_rate_trace, RateTrace};
