//! Depth-first search over allocation and ordering decisions.
//!
//! Tasks are appended one at a time in non-decreasing order of start time.
//! Appending task `t` with a resource choice fixes, for every conflict pair
//! between `t` and an already placed task, the direction "placed task first",
//! and asserts the matching difference constraints. The least solution of the
//! difference-logic engine then gives `t` its left-shifted start, which no
//! later decision can move. Every left-shifted schedule is reached by exactly
//! one append order (sorted by start, ties by task index), so the search is
//! complete over allocations and orderings.
//!
//! Pruning, all of which keeps at least one optimal schedule reachable:
//! - per-job tardiness caps are hard difference constraints;
//! - a task may only be appended if it starts before the earliest completion
//!   of every other ready task (otherwise moving that task in front is no
//!   worse);
//! - among interchangeable instances (same class, same capabilities) only the
//!   earliest available one, ties by index, is tried;
//! - a per-job completion bound (release-date relaxation of the remaining work)
//!   bounds both the caps and the objective.

use std::time::Instant;

use crate::dl::{DlEngine, DlVar};
use crate::model::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    Feasibility,
    Optimize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Config {
    pub cap: Option<i64>,
    pub symmetry: bool,
    pub mode: Mode,
    pub deadline: Option<Instant>,
    pub node_limit: Option<u64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Incumbent {
    pub total: i64,
    pub starts: Vec<i64>,
    pub alloc: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub best: Option<Incumbent>,
    /// The search space was exhausted, so `best` is optimal (or absent
    /// because no schedule exists).
    pub complete: bool,
}

#[derive(Debug, Clone)]
struct Branch {
    task: usize,
    alloc: Vec<usize>,
    start: i64,
}

/// One resource per demanded class, and the start it implies.
type Choice = (Vec<usize>, i64);

struct Undo {
    task: usize,
    res: Vec<(usize, Option<usize>, i64)>,
    job_last: Option<usize>,
    job_free: i64,
    last: Option<usize>,
    time: i64,
}

pub(crate) struct Search<'m> {
    model: &'m Model,
    cfg: Config,
    dl: DlEngine,
    vars: Vec<DlVar>,
    root_ok: bool,
    placed: Vec<bool>,
    pending: Vec<usize>,
    alloc: Vec<Vec<usize>>,
    start: Vec<i64>,
    res_free: Vec<i64>,
    res_last: Vec<Option<usize>>,
    job_free: Vec<i64>,
    job_last: Vec<Option<usize>>,
    job_left: Vec<i64>,
    job_open: Vec<usize>,
    last: Option<usize>,
    time: i64,
    n_placed: usize,
    undo: Vec<Undo>,
    best: Option<Incumbent>,
    root_lb: i64,
    nodes: u64,
    interrupted: bool,
}

impl<'m> Search<'m> {
    pub fn new(model: &'m Model, cfg: Config) -> Self {
        let n = model.num_tasks();
        let mut dl = DlEngine::new();
        let z = dl.zero();
        let vars: Vec<DlVar> = (0..n)
            .map(|t| dl.new_var(model.task_ref(t).to_string()))
            .collect();
        let mut root_ok = true;
        for (t, node) in model.tasks.iter().enumerate() {
            root_ok &= dl.assert_upper(z, vars[t], 0).is_feasible();
            for &p in &node.preds {
                root_ok &= dl
                    .assert_lower(vars[t], vars[p], model.tasks[p].duration)
                    .is_feasible();
            }
        }
        if let Some(cap) = cfg.cap {
            for (t, node) in model.tasks.iter().enumerate() {
                let latest = model.jobs[node.job].deadline + cap - node.duration;
                root_ok &= dl.assert_upper(vars[t], z, latest).is_feasible();
            }
        }
        let job_left = model
            .jobs
            .iter()
            .map(|j| j.tasks.iter().map(|&t| model.tasks[t].duration).sum())
            .collect();
        Search {
            model,
            cfg,
            dl,
            vars,
            root_ok,
            placed: vec![false; n],
            pending: model.tasks.iter().map(|t| t.preds.len()).collect(),
            alloc: vec![Vec::new(); n],
            start: vec![0; n],
            res_free: vec![0; model.resources.len()],
            res_last: vec![None; model.resources.len()],
            job_free: vec![0; model.jobs.len()],
            job_last: vec![None; model.jobs.len()],
            job_left,
            job_open: model.jobs.iter().map(|j| j.tasks.len()).collect(),
            last: None,
            time: 0,
            n_placed: 0,
            undo: Vec::new(),
            best: None,
            root_lb: 0,
            nodes: 0,
            interrupted: false,
        }
    }

    /// Seeds the search with a known schedule; only strictly better ones are
    /// reported afterwards.
    pub fn with_incumbent(mut self, inc: Option<Incumbent>) -> Self {
        self.best = inc;
        self
    }

    pub fn run(mut self) -> Outcome {
        if self.root_ok {
            if let Some(lb) = self.bounds() {
                self.root_lb = lb;
                if !self.best.as_ref().is_some_and(|b| b.total <= lb) {
                    self.dfs();
                }
            }
        }
        Outcome {
            best: self.best,
            complete: !self.interrupted,
        }
    }

    fn floor(&self, t: usize) -> i64 {
        match self.last {
            None => 0,
            Some(l) if t > l => self.time,
            Some(_) => self.time + 1,
        }
    }

    fn out_of_budget(&mut self) -> bool {
        if self.cfg.node_limit.is_some_and(|lim| self.nodes >= lim) {
            self.interrupted = true;
        } else if self.nodes.is_multiple_of(256) {
            if let Some(d) = self.cfg.deadline {
                if Instant::now() >= d {
                    self.interrupted = true;
                }
            }
        }
        self.interrupted
    }

    /// Returns true when the search should stop.
    fn dfs(&mut self) -> bool {
        self.nodes += 1;
        if self.out_of_budget() {
            return true;
        }
        if self.n_placed == self.model.num_tasks() {
            return self.record();
        }
        let Some(lb) = self.bounds() else {
            return false;
        };
        if self.cfg.mode == Mode::Optimize && self.best.as_ref().is_some_and(|b| lb >= b.total) {
            return false;
        }
        for br in self.branches() {
            if self.cfg.mode == Mode::Optimize && self.best.as_ref().is_some_and(|b| lb >= b.total)
            {
                return false;
            }
            if !self.apply(&br) {
                continue;
            }
            let stop = self.dfs();
            self.revert();
            if stop {
                return true;
            }
        }
        false
    }

    fn record(&mut self) -> bool {
        let total: i64 = self
            .model
            .jobs
            .iter()
            .enumerate()
            .map(|(j, job)| (self.job_free[j] - job.deadline).max(0))
            .sum();
        if self.best.as_ref().is_none_or(|b| total < b.total) {
            self.best = Some(Incumbent {
                total,
                starts: self.start.clone(),
                alloc: self.alloc.clone(),
            });
        }
        self.cfg.mode == Mode::Feasibility || total <= self.root_lb
    }

    /// Lower bound on total tardiness of any completion of the current
    /// partial schedule, or `None` if some job cannot meet its cap.
    fn bounds(&self) -> Option<i64> {
        let model = self.model;
        let floor = self.time;
        let mut releases: Vec<(i64, i64)> = Vec::new();
        let mut total = 0;
        for (j, job) in model.jobs.iter().enumerate() {
            let completion = if self.job_open[j] == 0 {
                self.job_free[j]
            } else {
                releases.clear();
                for &t in &job.tasks {
                    if self.placed[t] {
                        continue;
                    }
                    let node = &model.tasks[t];
                    let mut r = floor
                        .max(self.job_free[j])
                        .max(self.dl.lower_bound(self.vars[t]).unwrap_or(0));
                    for d in &node.demands {
                        let avail = d
                            .candidates
                            .iter()
                            .map(|&c| self.res_free[c])
                            .min()
                            .unwrap_or(0);
                        r = r.max(avail);
                    }
                    releases.push((r, node.duration));
                }
                releases.sort_unstable();
                releases.iter().fold(0, |cur, &(r, p)| cur.max(r) + p)
            };
            if let Some(cap) = self.cfg.cap {
                if completion > job.deadline + cap {
                    return None;
                }
            }
            total += (completion - job.deadline).max(0);
        }
        Some(total)
    }

    fn options(&self, t: usize) -> Vec<Choice> {
        let model = self.model;
        let node = &model.tasks[t];
        let floor = self.floor(t);
        let base = floor
            .max(self.job_free[node.job])
            .max(self.dl.lower_bound(self.vars[t]).unwrap_or(0));
        // Per class, the instances worth trying.
        let mut per_class: Vec<Vec<usize>> = Vec::with_capacity(node.demands.len());
        for d in &node.demands {
            let choices: Vec<usize> = if self.cfg.symmetry {
                let mut best_in_group: Vec<(usize, i64, usize)> = Vec::new();
                for &c in &d.candidates {
                    let eff = self.res_free[c].max(floor);
                    let g = model.resources[c].group;
                    match best_in_group.iter_mut().find(|(bg, _, _)| *bg == g) {
                        Some(entry) => {
                            if eff < entry.1 {
                                *entry = (g, eff, c);
                            }
                        }
                        None => best_in_group.push((g, eff, c)),
                    }
                }
                best_in_group.into_iter().map(|(_, _, c)| c).collect()
            } else {
                d.candidates.clone()
            };
            per_class.push(choices);
        }
        let mut out = vec![(Vec::new(), base)];
        for choices in per_class {
            let mut next = Vec::with_capacity(out.len() * choices.len());
            for (alloc, start) in &out {
                for &c in &choices {
                    let mut a = alloc.clone();
                    a.push(c);
                    next.push((a, (*start).max(self.res_free[c])));
                }
            }
            out = next;
        }
        out
    }

    fn branches(&self) -> Vec<Branch> {
        let model = self.model;
        let mut cands: Vec<(usize, Vec<Choice>)> = Vec::new();
        let mut threshold = i64::MAX;
        for t in 0..model.num_tasks() {
            if self.placed[t] || self.pending[t] > 0 {
                continue;
            }
            let opts = self.options(t);
            if let Some(earliest) = opts.iter().map(|(_, s)| *s).min() {
                threshold = threshold.min(earliest + model.tasks[t].duration);
            }
            cands.push((t, opts));
        }
        let mut out: Vec<(i64, i64, usize, Branch)> = Vec::new();
        for (t, opts) in cands {
            let node = &model.tasks[t];
            let urgency = model.jobs[node.job].deadline - self.job_left[node.job];
            let capable: usize = node.demands.iter().map(|d| d.candidates.len()).sum();
            for (alloc, start) in opts {
                if start < threshold {
                    out.push((
                        urgency,
                        start,
                        capable,
                        Branch {
                            task: t,
                            alloc,
                            start,
                        },
                    ));
                }
            }
        }
        out.sort_by_key(|a| (a.0, a.1, a.2, a.3.task));
        out.into_iter().map(|(_, _, _, b)| b).collect()
    }

    fn apply(&mut self, br: &Branch) -> bool {
        let model = self.model;
        let t = br.task;
        let node = &model.tasks[t];
        let v = self.vars[t];
        self.dl.push();
        let mut ok = true;
        if let Some(l) = self.last {
            let gap = if t > l { 0 } else { 1 };
            ok &= self.dl.assert_lower(v, self.vars[l], gap).is_feasible();
        }
        for &r in &br.alloc {
            if let Some(u) = self.res_last[r] {
                ok &= self
                    .dl
                    .assert_lower(v, self.vars[u], model.tasks[u].duration)
                    .is_feasible();
            }
        }
        if let Some(u) = self.job_last[node.job] {
            ok &= self
                .dl
                .assert_lower(v, self.vars[u], model.tasks[u].duration)
                .is_feasible();
        }
        if !ok {
            self.dl.pop().expect("level pushed above");
            return false;
        }
        let s = self
            .dl
            .lower_bound(v)
            .expect("tasks are anchored at the origin");
        debug_assert_eq!(s, br.start);
        let end = s + node.duration;

        let mut res = Vec::with_capacity(br.alloc.len());
        for &r in &br.alloc {
            res.push((r, self.res_last[r], self.res_free[r]));
            self.res_last[r] = Some(t);
            self.res_free[r] = end;
        }
        self.undo.push(Undo {
            task: t,
            res,
            job_last: self.job_last[node.job],
            job_free: self.job_free[node.job],
            last: self.last,
            time: self.time,
        });
        self.job_last[node.job] = Some(t);
        self.job_free[node.job] = end;
        self.job_left[node.job] -= node.duration;
        self.job_open[node.job] -= 1;
        self.last = Some(t);
        self.time = s;
        self.placed[t] = true;
        self.n_placed += 1;
        self.start[t] = s;
        self.alloc[t] = br.alloc.clone();
        for &succ in &node.succs {
            self.pending[succ] -= 1;
        }
        true
    }

    fn revert(&mut self) {
        let u = self.undo.pop().expect("revert matches apply");
        let model = self.model;
        let t = u.task;
        let node = &model.tasks[t];
        for &succ in &node.succs {
            self.pending[succ] += 1;
        }
        self.placed[t] = false;
        self.n_placed -= 1;
        self.job_last[node.job] = u.job_last;
        self.job_free[node.job] = u.job_free;
        self.job_left[node.job] += node.duration;
        self.job_open[node.job] += 1;
        self.last = u.last;
        self.time = u.time;
        for (r, last, free) in u.res.into_iter().rev() {
            self.res_last[r] = last;
            self.res_free[r] = free;
        }
        self.dl.pop().expect("level pushed in apply");
    }
}
