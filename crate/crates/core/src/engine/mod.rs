//! Event-driven execution of a job graph on cores sharing one NoC budget.

mod share;
mod sim;
mod trace;

pub use share::bandwidth_shares;
pub use sim::{run_gated, run_waitall, EngineParams};
pub use trace::{CoreShare, Interval, JobRecord, ScheduleTrace};

#[cfg(test)]
pub(crate) use tests::check_schedule;
