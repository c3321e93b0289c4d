use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::Model;

/// One scheduled task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub job: String,
    pub op: String,
    pub start: i64,
    pub end: i64,
    /// `(class, index)` of every resource instance used.
    pub resources: Vec<(String, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub assignments: Vec<Assignment>,
    /// Tardiness per job id.
    pub tardiness: BTreeMap<String, i64>,
    pub total_tardiness: i64,
    #[serde(default)]
    pub proven_optimal: bool,
}

impl Schedule {
    /// Completion time of every job that has at least one assignment.
    pub fn completions(&self) -> BTreeMap<String, i64> {
        let mut out: BTreeMap<String, i64> = BTreeMap::new();
        for a in &self.assignments {
            let c = out.entry(a.job.clone()).or_insert(a.end);
            *c = (*c).max(a.end);
        }
        out
    }

    pub fn start_of(&self, job: &str, op: &str) -> Option<i64> {
        self.assignments
            .iter()
            .find(|a| a.job == job && a.op == op)
            .map(|a| a.start)
    }

    /// Start times in task order, the key used to compare schedules.
    pub fn start_vector(&self) -> Vec<i64> {
        self.assignments.iter().map(|a| a.start).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    /// Builds a schedule from dense starts and allocations.
    pub(crate) fn from_dense(
        model: &Model,
        starts: &[i64],
        alloc: &[Vec<usize>],
        proven_optimal: bool,
    ) -> Schedule {
        let assignments: Vec<Assignment> = model
            .refs
            .iter()
            .enumerate()
            .map(|(t, r)| {
                let mut resources: Vec<(String, u32)> = alloc[t]
                    .iter()
                    .map(|&ri| (model.resources[ri].class.clone(), model.resources[ri].index))
                    .collect();
                resources.sort();
                Assignment {
                    job: r.job.clone(),
                    op: r.op.clone(),
                    start: starts[t],
                    end: starts[t] + model.tasks[t].duration,
                    resources,
                }
            })
            .collect();
        let mut tardiness = BTreeMap::new();
        for job in &model.jobs {
            let c = job
                .tasks
                .iter()
                .map(|&t| starts[t] + model.tasks[t].duration)
                .max()
                .unwrap_or(0);
            tardiness.insert(job.id.clone(), (c - job.deadline).max(0));
        }
        let total_tardiness = tardiness.values().sum();
        Schedule {
            assignments,
            tardiness,
            total_tardiness,
            proven_optimal,
        }
    }
}
