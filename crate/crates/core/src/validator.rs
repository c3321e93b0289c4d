//! Independent schedule checker.
//!
//! Works straight from the [`Instance`] description and shares nothing with
//! the solver's model or propagation. Intervals are half-open: a task
//! occupies `[start, start + duration)`, so back-to-back tasks are legal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::instance::Instance;
use crate::schedule::{Assignment, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// The resource set is not exactly one capable instance per demanded class.
    DemandUnmet,
    /// Negative start, or an end that is not start plus duration.
    PreemptionOrNegativeTime,
    SameJobOverlap,
    ResourceOverlap,
    PrecedenceOrder,
    TardinessMiscomputed,
    /// Unknown job, operation or resource, or a task missing or repeated.
    Alien,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::DemandUnmet => "demand-unmet",
            ViolationKind::PreemptionOrNegativeTime => "preemption-or-negative-time",
            ViolationKind::SameJobOverlap => "same-job-overlap",
            ViolationKind::ResourceOverlap => "resource-overlap",
            ViolationKind::PrecedenceOrder => "precedence-order",
            ViolationKind::TardinessMiscomputed => "tardiness-miscomputed",
            ViolationKind::Alien => "alien",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub entities: Vec<String>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}]: {}",
            self.kind,
            self.entities.join(", "),
            self.detail
        )
    }
}

fn task_name(a: &Assignment) -> String {
    format!("({},{})", a.job, a.op)
}

fn overlaps(a: (i64, i64), b: (i64, i64)) -> bool {
    a.0 < b.1 && b.0 < a.1
}

pub fn check_schedule(inst: &Instance, sched: &Schedule) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |kind, entities: Vec<String>, detail: String| {
        out.push(Violation {
            kind,
            entities,
            detail,
        })
    };

    let durations: BTreeMap<&str, i64> = inst
        .operations
        .iter()
        .map(|o| (o.id.as_str(), i64::from(o.duration)))
        .collect();
    let declared: BTreeSet<(&str, u32)> = inst
        .resources
        .iter()
        .map(|r| (r.class.as_str(), r.index))
        .collect();

    // Known, first-seen assignments with their true interval.
    let mut known: Vec<(&Assignment, (i64, i64))> = Vec::new();
    let mut seen: BTreeSet<(&str, &str)> = BTreeSet::new();
    for a in &sched.assignments {
        let in_job = inst.job(&a.job).is_some_and(|j| j.ops.contains(&a.op));
        let Some(&dur) = durations.get(a.op.as_str()).filter(|_| in_job) else {
            push(
                ViolationKind::Alien,
                vec![task_name(a)],
                "task is not part of the instance".into(),
            );
            continue;
        };
        if !seen.insert((&a.job, &a.op)) {
            push(
                ViolationKind::Alien,
                vec![task_name(a)],
                "task scheduled more than once".into(),
            );
            continue;
        }
        for (class, index) in &a.resources {
            if !declared.contains(&(class.as_str(), *index)) {
                push(
                    ViolationKind::Alien,
                    vec![task_name(a), format!("({class},{index})")],
                    "undeclared resource instance".into(),
                );
            }
        }
        known.push((a, (a.start, a.start + dur)));
    }
    for j in &inst.jobs {
        for op in &j.ops {
            if !seen.contains(&(j.id.as_str(), op.as_str())) {
                push(
                    ViolationKind::Alien,
                    vec![format!("({},{op})", j.id)],
                    "task is not scheduled".into(),
                );
            }
        }
    }

    for &(a, (start, end)) in &known {
        let demanded: BTreeSet<&str> = inst
            .demanded_classes(&a.op)
            .map(|c| c.iter().map(String::as_str).collect())
            .unwrap_or_default();
        let mut per_class: BTreeMap<&str, usize> = BTreeMap::new();
        for (class, index) in &a.resources {
            *per_class.entry(class).or_default() += 1;
            let capable = inst
                .resources
                .iter()
                .any(|r| r.class == *class && r.index == *index && r.capabilities.contains(&a.op));
            if declared.contains(&(class.as_str(), *index)) && !capable {
                push(
                    ViolationKind::DemandUnmet,
                    vec![task_name(a), format!("({class},{index})")],
                    "instance cannot run the operation".into(),
                );
            }
        }
        for class in &demanded {
            match per_class.get(class).copied().unwrap_or(0) {
                1 => {}
                0 => push(
                    ViolationKind::DemandUnmet,
                    vec![task_name(a), class.to_string()],
                    "no instance of a demanded class".into(),
                ),
                n => push(
                    ViolationKind::DemandUnmet,
                    vec![task_name(a), class.to_string()],
                    format!("{n} instances of one demanded class"),
                ),
            }
        }
        for class in per_class.keys() {
            if !demanded.contains(class) {
                push(
                    ViolationKind::DemandUnmet,
                    vec![task_name(a), class.to_string()],
                    "class is not demanded by the operation".into(),
                );
            }
        }
        if start < 0 || a.end != end {
            push(
                ViolationKind::PreemptionOrNegativeTime,
                vec![task_name(a)],
                format!("start {} end {}, expected end {end}", a.start, a.end),
            );
        }
    }

    for (i, &(a, ia)) in known.iter().enumerate() {
        for &(b, ib) in &known[i + 1..] {
            if !overlaps(ia, ib) {
                continue;
            }
            if a.job == b.job {
                push(
                    ViolationKind::SameJobOverlap,
                    vec![task_name(a), task_name(b)],
                    format!("[{}, {}) and [{}, {}) intersect", ia.0, ia.1, ib.0, ib.1),
                );
            }
            for r in &a.resources {
                if b.resources.contains(r) {
                    push(
                        ViolationKind::ResourceOverlap,
                        vec![format!("({},{})", r.0, r.1), task_name(a), task_name(b)],
                        format!("[{}, {}) and [{}, {}) intersect", ia.0, ia.1, ib.0, ib.1),
                    );
                }
            }
        }
    }

    let interval: BTreeMap<(&str, &str), (i64, i64)> = known
        .iter()
        .map(|(a, iv)| ((a.job.as_str(), a.op.as_str()), *iv))
        .collect();
    for j in &inst.jobs {
        for (before, after) in &j.precedence {
            let (Some(x), Some(y)) = (
                interval.get(&(j.id.as_str(), before.as_str())),
                interval.get(&(j.id.as_str(), after.as_str())),
            ) else {
                continue;
            };
            if x.1 > y.0 {
                push(
                    ViolationKind::PrecedenceOrder,
                    vec![
                        format!("({},{before})", j.id),
                        format!("({},{after})", j.id),
                    ],
                    format!("{before} ends at {} but {after} starts at {}", x.1, y.0),
                );
            }
        }
    }

    let truth = job_tardiness(inst, sched);
    for (job, t) in &truth {
        match sched.tardiness.get(job) {
            Some(r) if r == t => {}
            reported => push(
                ViolationKind::TardinessMiscomputed,
                vec![job.clone()],
                format!("reported {reported:?}, actual {t}"),
            ),
        }
    }
    for job in sched.tardiness.keys() {
        if !truth.contains_key(job) {
            push(
                ViolationKind::TardinessMiscomputed,
                vec![job.clone()],
                "unknown job in report".into(),
            );
        }
    }
    let total: i64 = truth.values().sum();
    if sched.total_tardiness != total {
        push(
            ViolationKind::TardinessMiscomputed,
            vec!["total".into()],
            format!("reported {}, actual {total}", sched.total_tardiness),
        );
    }
    out
}

/// `max(0, C_j - d_j)` for every job, with completion times taken from the
/// starts and the instance's durations.
pub fn job_tardiness(inst: &Instance, sched: &Schedule) -> BTreeMap<String, i64> {
    let durations: BTreeMap<&str, i64> = inst
        .operations
        .iter()
        .map(|o| (o.id.as_str(), i64::from(o.duration)))
        .collect();
    inst.jobs
        .iter()
        .map(|j| {
            let completion = sched
                .assignments
                .iter()
                .filter(|a| a.job == j.id)
                .map(|a| durations.get(a.op.as_str()).map_or(a.end, |d| a.start + d))
                .max()
                .unwrap_or(0);
            (j.id.clone(), (completion - i64::from(j.deadline)).max(0))
        })
        .collect()
}

/// `T = sum_j max(0, C_j - d_j)`.
pub fn total_tardiness(inst: &Instance, sched: &Schedule) -> i64 {
    job_tardiness(inst, sched).values().sum()
}
