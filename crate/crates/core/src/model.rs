//! Dense, index-based view of a validated instance used by the solvers.

use std::collections::BTreeMap;

use crate::error::SolveError;
use crate::instance::{tasks, validate_instance, Instance, TaskRef};

#[derive(Debug, Clone)]
pub(crate) struct TaskNode {
    pub job: usize,
    pub duration: i64,
    /// Per demanded class, the capable resources sorted by instance index.
    pub demands: Vec<ClassDemand>,
    /// Direct precedence predecessors.
    pub preds: Vec<usize>,
    pub succs: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct ClassDemand {
    pub class: String,
    pub candidates: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct JobNode {
    pub id: String,
    pub deadline: i64,
    pub tasks: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct ResourceNode {
    pub class: String,
    pub index: u32,
    /// Instances sharing class and capability set share a group.
    pub group: usize,
}

/// A validated instance compiled to dense indices.
#[derive(Debug, Clone)]
pub struct Model {
    pub(crate) tasks: Vec<TaskNode>,
    pub(crate) refs: Vec<TaskRef>,
    pub(crate) jobs: Vec<JobNode>,
    pub(crate) resources: Vec<ResourceNode>,
    /// `before[a][b]`: task `a` precedes task `b` in the transitive closure of
    /// its job's precedence. Only same-job entries can be true.
    pub(crate) before: Vec<Vec<bool>>,
}

impl Model {
    /// Compiles an instance, refusing any instance with structural violations.
    pub fn compile(inst: &Instance) -> Result<Model, SolveError> {
        let violations = validate_instance(inst);
        if !violations.is_empty() {
            return Err(if violations.iter().any(|v| v.is_capability_gap()) {
                SolveError::Unsolvable(violations)
            } else {
                SolveError::InvalidInstance(violations)
            });
        }

        let mut resources: Vec<ResourceNode> = Vec::new();
        let mut sorted_res: Vec<_> = inst.resources.iter().collect();
        sorted_res.sort_by(|a, b| (&a.class, a.index).cmp(&(&b.class, b.index)));
        let mut groups: BTreeMap<(&str, Vec<&str>), usize> = BTreeMap::new();
        for r in &sorted_res {
            let key = (
                r.class.as_str(),
                r.capabilities.iter().map(String::as_str).collect(),
            );
            let next = groups.len();
            let group = *groups.entry(key).or_insert(next);
            resources.push(ResourceNode {
                class: r.class.clone(),
                index: r.index,
                group,
            });
        }

        let refs = tasks(inst);
        let task_index: BTreeMap<&TaskRef, usize> =
            refs.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut specs: Vec<_> = inst.jobs.iter().collect();
        specs.sort_by(|a, b| a.id.cmp(&b.id));
        let mut jobs: Vec<JobNode> = specs
            .iter()
            .map(|spec| JobNode {
                id: spec.id.clone(),
                deadline: i64::from(spec.deadline),
                tasks: Vec::new(),
            })
            .collect();
        let job_index: BTreeMap<&str, usize> = specs
            .iter()
            .enumerate()
            .map(|(i, j)| (j.id.as_str(), i))
            .collect();
        let mut task_nodes = Vec::with_capacity(refs.len());
        for (i, t) in refs.iter().enumerate() {
            let j = job_index[t.job.as_str()];
            jobs[j].tasks.push(i);
            let duration = i64::from(inst.operation(&t.op).expect("validated op").duration);
            let demands = inst
                .demanded_classes(&t.op)
                .into_iter()
                .flatten()
                .map(|class| ClassDemand {
                    class: class.clone(),
                    candidates: sorted_res
                        .iter()
                        .enumerate()
                        .filter(|(_, r)| r.class == *class && r.capabilities.contains(&t.op))
                        .map(|(ri, _)| ri)
                        .collect(),
                })
                .collect();
            task_nodes.push(TaskNode {
                job: j,
                duration,
                demands,
                preds: Vec::new(),
                succs: Vec::new(),
            });
        }

        let n = refs.len();
        let mut before = vec![vec![false; n]; n];
        for spec in &inst.jobs {
            for (a, b) in &spec.precedence {
                let ia = task_index[&TaskRef::new(spec.id.clone(), a.clone())];
                let ib = task_index[&TaskRef::new(spec.id.clone(), b.clone())];
                if !task_nodes[ib].preds.contains(&ia) {
                    task_nodes[ib].preds.push(ia);
                    task_nodes[ia].succs.push(ib);
                }
                before[ia][ib] = true;
            }
        }
        // Transitive closure inside each job.
        for job in &jobs {
            for &k in &job.tasks {
                for &i in &job.tasks {
                    if before[i][k] {
                        for &j in &job.tasks {
                            if before[k][j] {
                                before[i][j] = true;
                            }
                        }
                    }
                }
            }
        }

        Ok(Model {
            tasks: task_nodes,
            refs,
            jobs,
            resources,
            before,
        })
    }

    pub fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn task_ref(&self, t: usize) -> &TaskRef {
        &self.refs[t]
    }

    pub(crate) fn task_index(&self, t: &TaskRef) -> Option<usize> {
        self.refs.binary_search(t).ok()
    }

    pub(crate) fn resource_index(&self, class: &str, index: u32) -> Option<usize> {
        self.resources
            .iter()
            .position(|r| r.class == class && r.index == index)
    }

    /// Sum of all task durations: a cap under which a serial schedule always
    /// fits.
    pub fn total_work(&self) -> i64 {
        self.tasks.iter().map(|t| t.duration).sum()
    }

    /// Same job and not related by the precedence closure.
    pub(crate) fn unordered_same_job(&self, a: usize, b: usize) -> bool {
        a != b && self.tasks[a].job == self.tasks[b].job && !self.before[a][b] && !self.before[b][a]
    }
}
