//! Exhaustive optimal-tardiness oracle for very small instances.
//!
//! Enumerates every precedence-respecting task sequence together with every
//! resource choice, placing each task at the earliest time its job, its
//! predecessors and its chosen instances allow. Total tardiness is regular,
//! so some optimal schedule is left-shifted and appears in that enumeration.
//! Sequences are restricted to non-decreasing starts with ties taken in task
//! order, which still reaches every left-shifted schedule.
//!
//! Shares no code with the solver beyond the instance types.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::instance::{tasks, validate_instance, Instance, InstanceViolation};
use crate::schedule::{Assignment, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_jobs: usize,
    pub max_tasks: usize,
    /// Largest admissible sum of task durations plus deadline.
    pub horizon: i64,
    pub node_limit: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_jobs: 4,
            max_tasks: 10,
            horizon: 1000,
            node_limit: 50_000_000,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance exceeds the oracle budget: {0}")]
    OverBudget(String),
    #[error("node limit of {0} reached")]
    NodeLimit(u64),
    #[error("instance is not valid: {0:?}")]
    Invalid(Vec<InstanceViolation>),
}

struct Task {
    job: usize,
    duration: i64,
    preds: Vec<usize>,
    /// Every combination of one capable instance per demanded class.
    choices: Vec<Vec<usize>>,
}

struct Enum<'a> {
    tasks: &'a [Task],
    deadlines: &'a [i64],
    nodes: u64,
    limit: u64,
    start: Vec<Option<i64>>,
    choice: Vec<usize>,
    res_free: Vec<i64>,
    job_end: Vec<i64>,
    best: i64,
    best_plan: Option<(Vec<i64>, Vec<usize>)>,
}

impl Enum<'_> {
    fn tardiness(&self) -> i64 {
        self.job_end
            .iter()
            .zip(self.deadlines)
            .map(|(c, d)| (c - d).max(0))
            .sum()
    }

    fn go(&mut self, placed: usize, last: (i64, usize)) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(OracleError::NodeLimit(self.limit));
        }
        let t_now = self.tardiness();
        if t_now >= self.best {
            return Ok(());
        }
        if placed == self.tasks.len() {
            self.best = t_now;
            self.best_plan = Some((
                self.start.iter().map(|s| s.unwrap()).collect(),
                self.choice.clone(),
            ));
            return Ok(());
        }
        for t in 0..self.tasks.len() {
            if self.start[t].is_some() {
                continue;
            }
            let task = &self.tasks[t];
            let mut ready = self.job_end[task.job];
            let mut ok = true;
            for &p in &task.preds {
                match self.start[p] {
                    Some(s) => ready = ready.max(s + self.tasks[p].duration),
                    None => ok = false,
                }
            }
            if !ok {
                continue;
            }
            for (ci, combo) in task.choices.iter().enumerate() {
                let s = combo
                    .iter()
                    .fold(ready, |acc, &r| acc.max(self.res_free[r]));
                if (s, t) < last {
                    continue;
                }
                let end = s + task.duration;
                let saved_res: Vec<i64> = combo.iter().map(|&r| self.res_free[r]).collect();
                let saved_job = self.job_end[task.job];
                for &r in combo {
                    self.res_free[r] = end;
                }
                self.job_end[task.job] = end;
                self.start[t] = Some(s);
                self.choice[t] = ci;
                let r = self.go(placed + 1, (s, t));
                self.start[t] = None;
                self.job_end[task.job] = saved_job;
                for (&r, &v) in combo.iter().zip(&saved_res) {
                    self.res_free[r] = v;
                }
                r?;
            }
        }
        Ok(())
    }
}

/// Minimum total tardiness over all valid schedules, with a witness.
pub fn brute_force_optimal(
    inst: &Instance,
    budget: &OracleBudget,
) -> Result<(i64, Schedule), OracleError> {
    let violations = validate_instance(inst);
    if !violations.is_empty() {
        return Err(OracleError::Invalid(violations));
    }
    let refs = tasks(inst);
    let mut job_ids: Vec<&str> = inst.jobs.iter().map(|j| j.id.as_str()).collect();
    job_ids.sort_unstable();
    if job_ids.len() > budget.max_jobs {
        return Err(OracleError::OverBudget(format!("{} jobs", job_ids.len())));
    }
    if refs.len() > budget.max_tasks {
        return Err(OracleError::OverBudget(format!("{} tasks", refs.len())));
    }
    let resources: Vec<(&str, u32)> = inst
        .resources
        .iter()
        .map(|r| (r.class.as_str(), r.index))
        .collect();
    let mut list = Vec::with_capacity(refs.len());
    let mut work = 0i64;
    for r in &refs {
        let duration = i64::from(inst.operation(&r.op).expect("validated").duration);
        work += duration;
        let job = inst.job(&r.job).expect("validated");
        let preds = job
            .precedence
            .iter()
            .filter(|(_, b)| *b == r.op)
            .map(|(a, _)| {
                refs.iter()
                    .position(|x| x.job == r.job && x.op == *a)
                    .expect("validated")
            })
            .collect();
        let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
        for class in inst.demanded_classes(&r.op).into_iter().flatten() {
            let capable: Vec<usize> = inst
                .resources
                .iter()
                .enumerate()
                .filter(|(_, x)| x.class == *class && x.capabilities.contains(&r.op))
                .map(|(i, _)| i)
                .collect();
            choices = choices
                .iter()
                .flat_map(|c| {
                    capable.iter().map(move |&i| {
                        let mut c = c.clone();
                        c.push(i);
                        c
                    })
                })
                .collect();
        }
        list.push(Task {
            job: job_ids.binary_search(&r.job.as_str()).expect("known job"),
            duration,
            preds,
            choices,
        });
    }
    let deadlines: Vec<i64> = job_ids
        .iter()
        .map(|id| i64::from(inst.job(id).expect("known job").deadline))
        .collect();
    let max_deadline = deadlines.iter().copied().max().unwrap_or(0);
    if work + max_deadline > budget.horizon {
        return Err(OracleError::OverBudget(format!(
            "horizon {} needed",
            work + max_deadline
        )));
    }

    let mut e = Enum {
        tasks: &list,
        deadlines: &deadlines,
        nodes: 0,
        limit: budget.node_limit,
        start: vec![None; list.len()],
        choice: vec![0; list.len()],
        res_free: vec![0; resources.len()],
        job_end: vec![0; deadlines.len()],
        best: i64::MAX,
        best_plan: None,
    };
    e.go(0, (i64::MIN, 0))?;
    let best = e.best;
    let (starts, choice) = e.best_plan.expect("a serial schedule always exists");

    let assignments = refs
        .iter()
        .enumerate()
        .map(|(t, r)| {
            let mut used: Vec<(String, u32)> = list[t].choices[choice[t]]
                .iter()
                .map(|&i| (resources[i].0.to_string(), resources[i].1))
                .collect();
            used.sort();
            Assignment {
                job: r.job.clone(),
                op: r.op.clone(),
                start: starts[t],
                end: starts[t] + list[t].duration,
                resources: used,
            }
        })
        .collect::<Vec<_>>();
    let mut tardiness = BTreeMap::new();
    for (j, id) in job_ids.iter().enumerate() {
        let c = refs
            .iter()
            .enumerate()
            .filter(|(_, r)| r.job == *id)
            .map(|(t, _)| starts[t] + list[t].duration)
            .max()
            .unwrap_or(0);
        tardiness.insert(id.to_string(), (c - deadlines[j]).max(0));
    }
    Ok((
        best,
        Schedule {
            assignments,
            tardiness,
            total_tardiness: best,
            proven_optimal: true,
        },
    ))
}
