use thiserror::Error;

use crate::model::{InstanceIssue, ScheduleViolation};
use crate::sptree::NotSeriesParallel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed instance: {}", join(.0))]
    InvalidInstance(Vec<InstanceIssue>),

    #[error("infeasible instance: {jobs} jobs but only {slots} outage slots over the horizon")]
    Infeasible { jobs: usize, slots: usize },

    #[error("infeasible schedule: {}", join(.0))]
    InfeasibleSchedule(Vec<ScheduleViolation>),

    #[error(transparent)]
    NotSeriesParallel(#[from] NotSeriesParallel),

    #[error("enumeration of {size} assignments exceeds the cap of {cap}")]
    TooLarge { size: u128, cap: u128 },

    #[error("dynamic program list grew to {len} vectors, above the cap of {cap}")]
    BudgetExceeded { len: usize, cap: usize },

    #[error("solver requires {0}")]
    WrongLimits(&'static str),

    #[error("wrong topology: {0}")]
    WrongTopology(String),

    #[error("graph has no perfect matching")]
    NoPerfectMatching,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("throughput overflows a 64-bit integer")]
    Overflow,

    #[error("unsupported instance: {0}")]
    Unsupported(String),
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
