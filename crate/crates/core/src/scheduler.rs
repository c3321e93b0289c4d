//! Public scheduling entry points: feasibility under a tardiness cap,
//! tardiness minimization, and the ordering-level helpers.
//!
//! A cap `B` means every job's tardiness is at most `B`, i.e. every job
//! completes by `deadline + B`.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use crate::dl::DlEngine;
use crate::error::SolveError;
use crate::instance::{Instance, TaskRef};
use crate::model::Model;
use crate::schedule::Schedule;
use crate::search::{Config, Incumbent, Mode, Search};

/// Chosen instance index per demanded class, for every task.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Allocation(pub BTreeMap<TaskRef, BTreeMap<String, u32>>);

impl Allocation {
    pub fn from_schedule(s: &Schedule) -> Allocation {
        Allocation(
            s.assignments
                .iter()
                .map(|a| {
                    (
                        TaskRef::new(a.job.clone(), a.op.clone()),
                        a.resources.iter().cloned().collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn set(&mut self, task: TaskRef, class: impl Into<String>, index: u32) {
        self.0.entry(task).or_default().insert(class.into(), index);
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Restrict choices among interchangeable instances. Never changes
    /// verdicts or optima; exposed for testing that claim.
    pub symmetry_breaking: bool,
    pub deadline: Option<Instant>,
    pub node_limit: Option<u64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            symmetry_breaking: true,
            deadline: None,
            node_limit: None,
        }
    }
}

impl SearchOptions {
    pub fn with_budget(budget: Option<Duration>) -> Self {
        SearchOptions {
            deadline: budget.map(|b| Instant::now() + b),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Sat(Schedule),
    Unsat,
    /// The budget ran out before a verdict.
    Unknown,
}

impl Decision {
    pub fn is_sat(&self) -> bool {
        matches!(self, Decision::Sat(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    /// Best schedule found; `None` with `proven_optimal` means no schedule
    /// meets the cap.
    pub schedule: Option<Schedule>,
    pub proven_optimal: bool,
}

/// A compiled instance that can answer many cap queries.
#[derive(Debug, Clone)]
pub struct Solver {
    model: Model,
}

impl Solver {
    pub fn new(inst: &Instance) -> Result<Solver, SolveError> {
        Ok(Solver {
            model: Model::compile(inst)?,
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// Searches for a schedule in which no job is more than `cap` minutes late.
    pub fn decide(&self, cap: u64, opts: &SearchOptions) -> Decision {
        let out = Search::new(&self.model, self.config(Some(cap), Mode::Feasibility, opts)).run();
        match (out.best, out.complete) {
            (Some(inc), _) => Decision::Sat(Schedule::from_dense(
                &self.model,
                &inc.starts,
                &inc.alloc,
                false,
            )),
            (None, true) => Decision::Unsat,
            (None, false) => Decision::Unknown,
        }
    }

    /// Minimizes total tardiness subject to the per-job cap. `incumbent`, if
    /// given, must respect the cap; it seeds the bound.
    pub fn optimize(
        &self,
        cap: u64,
        opts: &SearchOptions,
        incumbent: Option<&Schedule>,
    ) -> Optimum {
        let seed = incumbent.and_then(|s| self.dense(s));
        let out = Search::new(&self.model, self.config(Some(cap), Mode::Optimize, opts))
            .with_incumbent(seed)
            .run();
        let schedule = out
            .best
            .map(|inc| Schedule::from_dense(&self.model, &inc.starts, &inc.alloc, out.complete));
        Optimum {
            schedule,
            proven_optimal: out.complete,
        }
    }

    fn config(&self, cap: Option<u64>, mode: Mode, opts: &SearchOptions) -> Config {
        Config {
            cap: cap.map(|c| {
                i64::try_from(c)
                    .unwrap_or(i64::MAX / 4)
                    .min(crate::dl::MAX_WEIGHT / 2)
            }),
            symmetry: opts.symmetry_breaking,
            mode,
            deadline: opts.deadline,
            node_limit: opts.node_limit,
        }
    }

    fn dense(&self, s: &Schedule) -> Option<Incumbent> {
        let n = self.model.num_tasks();
        if s.assignments.len() != n {
            return None;
        }
        let mut starts = vec![0; n];
        let mut alloc = vec![Vec::new(); n];
        for a in &s.assignments {
            let t = self
                .model
                .task_index(&TaskRef::new(a.job.clone(), a.op.clone()))?;
            starts[t] = a.start;
            alloc[t] = a
                .resources
                .iter()
                .map(|(c, i)| self.model.resource_index(c, *i))
                .collect::<Option<Vec<_>>>()?;
        }
        Some(Incumbent {
            total: s.total_tardiness,
            starts,
            alloc,
        })
    }

    fn dense_allocation(&self, alloc: &Allocation) -> Result<Vec<Vec<usize>>, SolveError> {
        let model = &self.model;
        let mut out = vec![Vec::new(); model.num_tasks()];
        for (t, node) in model.tasks.iter().enumerate() {
            let task = model.task_ref(t);
            let chosen = alloc.0.get(task);
            for d in &node.demands {
                let idx = chosen.and_then(|m| m.get(&d.class)).ok_or_else(|| {
                    SolveError::BadAllocation(format!(
                        "{task} has no instance of class {}",
                        d.class
                    ))
                })?;
                let r = model
                    .resource_index(&d.class, *idx)
                    .filter(|r| d.candidates.contains(r))
                    .ok_or_else(|| {
                        SolveError::BadAllocation(format!("({},{idx}) cannot run {task}", d.class))
                    })?;
                out[t].push(r);
            }
            if let Some(m) = chosen {
                if m.len() != node.demands.len() {
                    return Err(SolveError::BadAllocation(format!(
                        "{task} uses undemanded classes"
                    )));
                }
            }
        }
        for task in alloc.0.keys() {
            if model.task_index(task).is_none() {
                return Err(SolveError::UnknownTask(task.clone()));
            }
        }
        Ok(out)
    }

    fn dense_pairs(&self, alloc: &[Vec<usize>]) -> Vec<(usize, usize)> {
        let model = &self.model;
        let n = model.num_tasks();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let same_job = model.tasks[a].job == model.tasks[b].job;
                let conflict = if same_job {
                    model.unordered_same_job(a, b)
                } else {
                    alloc[a].iter().any(|r| alloc[b].contains(r))
                };
                if conflict {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Task pairs that need an ordering decision under `alloc`.
    pub fn conflict_pairs(
        &self,
        alloc: &Allocation,
    ) -> Result<BTreeSet<(TaskRef, TaskRef)>, SolveError> {
        let dense = self.dense_allocation(alloc)?;
        Ok(self
            .dense_pairs(&dense)
            .into_iter()
            .map(|(a, b)| {
                (
                    self.model.task_ref(a).clone(),
                    self.model.task_ref(b).clone(),
                )
            })
            .collect())
    }

    /// Left-shifted start times for a fully directed ordering. Each pair in
    /// `order` reads "first before second". Returns `Ok(None)` when the
    /// directions are cyclic.
    pub fn start_times_from_order(
        &self,
        alloc: &Allocation,
        order: &[(TaskRef, TaskRef)],
    ) -> Result<Option<Schedule>, SolveError> {
        let model = &self.model;
        let dense = self.dense_allocation(alloc)?;
        let mut directed = BTreeSet::new();
        for (a, b) in order {
            let ia = model
                .task_index(a)
                .ok_or_else(|| SolveError::UnknownTask(a.clone()))?;
            let ib = model
                .task_index(b)
                .ok_or_else(|| SolveError::UnknownTask(b.clone()))?;
            directed.insert((ia, ib));
        }
        for (a, b) in self.dense_pairs(&dense) {
            if !directed.contains(&(a, b)) && !directed.contains(&(b, a)) {
                return Err(SolveError::UndirectedPair(
                    model.task_ref(a).clone(),
                    model.task_ref(b).clone(),
                ));
            }
        }

        let mut dl = DlEngine::new();
        let z = dl.zero();
        let vars: Vec<_> = (0..model.num_tasks())
            .map(|t| dl.new_var(model.task_ref(t).to_string()))
            .collect();
        let mut ok = true;
        for (t, node) in model.tasks.iter().enumerate() {
            ok &= dl.assert_upper(z, vars[t], 0).is_feasible();
            for &p in &node.preds {
                ok &= dl
                    .assert_lower(vars[t], vars[p], model.tasks[p].duration)
                    .is_feasible();
            }
        }
        for &(a, b) in &directed {
            ok &= dl
                .assert_lower(vars[b], vars[a], model.tasks[a].duration)
                .is_feasible();
        }
        if !ok {
            return Ok(None);
        }
        let starts = dl.solution().expect("feasible state has a solution");
        Ok(Some(Schedule::from_dense(model, &starts, &dense, false)))
    }
}

pub fn conflict_pairs(
    inst: &Instance,
    alloc: &Allocation,
) -> Result<BTreeSet<(TaskRef, TaskRef)>, SolveError> {
    Solver::new(inst)?.conflict_pairs(alloc)
}

pub fn start_times_from_order(
    inst: &Instance,
    alloc: &Allocation,
    order: &[(TaskRef, TaskRef)],
) -> Result<Option<Schedule>, SolveError> {
    Solver::new(inst)?.start_times_from_order(alloc, order)
}

/// Complete feasibility check under a per-job tardiness cap.
pub fn decide(inst: &Instance, cap: u64) -> Result<Decision, SolveError> {
    Ok(Solver::new(inst)?.decide(cap, &SearchOptions::default()))
}

/// Minimal total tardiness under a per-job cap, within an optional time budget.
pub fn optimize(
    inst: &Instance,
    cap: u64,
    budget: Option<Duration>,
) -> Result<Optimum, SolveError> {
    Ok(Solver::new(inst)?.optimize(cap, &SearchOptions::with_budget(budget), None))
}
