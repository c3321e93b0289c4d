use thiserror::Error;

use crate::instance::{InstanceViolation, TaskRef};

#[derive(Debug, Error)]
pub enum SolveError {
    /// Some demanded class has no instance able to run an operation.
    #[error("instance cannot be scheduled: {}", join(.0))]
    Unsolvable(Vec<InstanceViolation>),
    #[error("instance is malformed: {}", join(.0))]
    InvalidInstance(Vec<InstanceViolation>),
    #[error("bad allocation: {0}")]
    BadAllocation(String),
    #[error("conflict pair {0} / {1} has no direction")]
    UndirectedPair(TaskRef, TaskRef),
    #[error("ordering references unknown task {0}")]
    UnknownTask(TaskRef),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

fn join(vs: &[InstanceViolation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
