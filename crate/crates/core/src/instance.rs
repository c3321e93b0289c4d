//! Instance data model: operations, resource instances, demands and jobs.
//!
//! An [`Instance`] is a plain, serde-friendly description of a shop. The
//! solver never works on it directly; it is compiled into a dense
//! [`Model`](crate::model::Model) after [`validate_instance`] has accepted it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// An operation type and its processing time in minutes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OperationSpec {
    pub id: String,
    pub duration: u32,
}

/// One instance of a resource class together with the operations it can run.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResourceInstance {
    pub class: String,
    pub index: u32,
    pub capabilities: BTreeSet<String>,
}

/// The resource classes an operation needs, one instance of each.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Demand {
    pub op: String,
    pub classes: BTreeSet<String>,
}

/// A job: the operations it must undergo, their partial order and a deadline
/// in minutes from shift start.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct JobSpec {
    pub id: String,
    pub ops: BTreeSet<String>,
    /// Pairs `(before, after)`.
    #[serde(default)]
    pub precedence: BTreeSet<(String, String)>,
    pub deadline: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    #[serde(default)]
    pub operations: Vec<OperationSpec>,
    #[serde(default)]
    pub resources: Vec<ResourceInstance>,
    #[serde(default)]
    pub demands: Vec<Demand>,
    #[serde(default)]
    pub jobs: Vec<JobSpec>,
}

/// A schedulable unit: one operation of one job.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TaskRef {
    pub job: String,
    pub op: String,
}

impl TaskRef {
    pub fn new(job: impl Into<String>, op: impl Into<String>) -> Self {
        TaskRef {
            job: job.into(),
            op: op.into(),
        }
    }
}

impl fmt::Display for TaskRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.job, self.op)
    }
}

impl Instance {
    /// Sorts every collection and merges duplicate demand entries, giving the
    /// canonical form produced by the fact parser.
    pub fn canonicalize(&mut self) {
        self.operations.sort();
        self.operations.dedup();
        self.resources.sort();
        self.resources.dedup();
        let mut demands: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for d in self.demands.drain(..) {
            demands.entry(d.op).or_default().extend(d.classes);
        }
        self.demands = demands
            .into_iter()
            .map(|(op, classes)| Demand { op, classes })
            .collect();
        self.jobs.sort();
        self.jobs.dedup();
    }

    pub fn operation(&self, id: &str) -> Option<&OperationSpec> {
        self.operations.iter().find(|o| o.id == id)
    }

    pub fn job(&self, id: &str) -> Option<&JobSpec> {
        self.jobs.iter().find(|j| j.id == id)
    }

    pub fn demanded_classes(&self, op: &str) -> Option<&BTreeSet<String>> {
        self.demands.iter().find(|d| d.op == op).map(|d| &d.classes)
    }

    /// Keeps only the jobs whose ids are in `keep`; the resource pool is shared.
    pub fn with_jobs<'a>(&self, keep: impl IntoIterator<Item = &'a str>) -> Instance {
        let keep: BTreeSet<&str> = keep.into_iter().collect();
        Instance {
            operations: self.operations.clone(),
            resources: self.resources.clone(),
            demands: self.demands.clone(),
            jobs: self
                .jobs
                .iter()
                .filter(|j| keep.contains(j.id.as_str()))
                .cloned()
                .collect(),
        }
    }
}

/// All `(job, op)` tasks, ordered by job id then op id.
pub fn tasks(inst: &Instance) -> Vec<TaskRef> {
    let mut jobs: Vec<&JobSpec> = inst.jobs.iter().collect();
    jobs.sort_by(|a, b| a.id.cmp(&b.id));
    jobs.dedup_by(|a, b| a.id == b.id);
    jobs.iter()
        .flat_map(|j| {
            j.ops
                .iter()
                .map(move |op| TaskRef::new(j.id.clone(), op.clone()))
        })
        .collect()
}

/// A structural problem found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum InstanceViolation {
    DuplicateOperation {
        op: String,
    },
    ZeroDuration {
        op: String,
    },
    DuplicateResource {
        class: String,
        index: u32,
    },
    ZeroResourceIndex {
        class: String,
    },
    UnknownCapability {
        class: String,
        index: u32,
        op: String,
    },
    UnknownDemandOp {
        op: String,
    },
    DuplicateJob {
        job: String,
    },
    UnknownJobOp {
        job: String,
        op: String,
    },
    PrecedenceOutsideJob {
        job: String,
        before: String,
        after: String,
    },
    PrecedenceCycle {
        job: String,
    },
    MissingDemand {
        op: String,
    },
    /// No instance of the class is declared at all.
    UndeclaredClass {
        op: String,
        class: String,
    },
    /// Instances of the class exist but none can run the operation.
    NoCapableInstance {
        op: String,
        class: String,
    },
}

impl InstanceViolation {
    /// True for the violations that make an otherwise well-formed instance
    /// impossible to schedule.
    pub fn is_capability_gap(&self) -> bool {
        matches!(
            self,
            InstanceViolation::UndeclaredClass { .. } | InstanceViolation::NoCapableInstance { .. }
        )
    }
}

impl fmt::Display for InstanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use InstanceViolation::*;
        match self {
            DuplicateOperation { op } => write!(f, "operation {op} declared more than once"),
            ZeroDuration { op } => write!(f, "operation {op} has zero duration"),
            DuplicateResource { class, index } => {
                write!(f, "resource ({class},{index}) declared more than once")
            }
            ZeroResourceIndex { class } => write!(f, "resource of class {class} has index 0"),
            UnknownCapability { class, index, op } => {
                write!(
                    f,
                    "resource ({class},{index}) lists undeclared operation {op}"
                )
            }
            UnknownDemandOp { op } => write!(f, "demand for undeclared operation {op}"),
            DuplicateJob { job } => write!(f, "job {job} declared more than once"),
            UnknownJobOp { job, op } => write!(f, "job {job} references undeclared operation {op}"),
            PrecedenceOutsideJob { job, before, after } => {
                write!(
                    f,
                    "job {job} orders ({before},{after}) outside its operations"
                )
            }
            PrecedenceCycle { job } => write!(f, "precedence of job {job} is cyclic"),
            MissingDemand { op } => {
                write!(f, "operation {op} is used by a job but has no demand entry")
            }
            UndeclaredClass { op, class } => {
                write!(f, "operation {op} demands undeclared class {class}")
            }
            NoCapableInstance { op, class } => {
                write!(f, "no instance of class {class} can run operation {op}")
            }
        }
    }
}

/// Checks every structural invariant of an instance. An empty result means the
/// instance can be compiled and handed to the solver.
pub fn validate_instance(inst: &Instance) -> Vec<InstanceViolation> {
    use InstanceViolation::*;
    let mut out = Vec::new();

    let mut ops = BTreeSet::new();
    for o in &inst.operations {
        if !ops.insert(o.id.as_str()) {
            out.push(DuplicateOperation { op: o.id.clone() });
        }
        if o.duration == 0 {
            out.push(ZeroDuration { op: o.id.clone() });
        }
    }

    let mut seen_res = BTreeSet::new();
    let mut classes: BTreeSet<&str> = BTreeSet::new();
    for r in &inst.resources {
        if !seen_res.insert((r.class.as_str(), r.index)) {
            out.push(DuplicateResource {
                class: r.class.clone(),
                index: r.index,
            });
        }
        if r.index == 0 {
            out.push(ZeroResourceIndex {
                class: r.class.clone(),
            });
        }
        classes.insert(&r.class);
        for op in &r.capabilities {
            if !ops.contains(op.as_str()) {
                out.push(UnknownCapability {
                    class: r.class.clone(),
                    index: r.index,
                    op: op.clone(),
                });
            }
        }
    }

    let mut demands: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for d in &inst.demands {
        if !ops.contains(d.op.as_str()) {
            out.push(UnknownDemandOp { op: d.op.clone() });
        }
        demands
            .entry(&d.op)
            .or_default()
            .extend(d.classes.iter().map(String::as_str));
    }

    let mut jobs = BTreeSet::new();
    let mut used_ops: BTreeSet<&str> = BTreeSet::new();
    for j in &inst.jobs {
        if !jobs.insert(j.id.as_str()) {
            out.push(DuplicateJob { job: j.id.clone() });
        }
        for op in &j.ops {
            if ops.contains(op.as_str()) {
                used_ops.insert(op);
            } else {
                out.push(UnknownJobOp {
                    job: j.id.clone(),
                    op: op.clone(),
                });
            }
        }
        for (a, b) in &j.precedence {
            if !j.ops.contains(a) || !j.ops.contains(b) {
                out.push(PrecedenceOutsideJob {
                    job: j.id.clone(),
                    before: a.clone(),
                    after: b.clone(),
                });
            }
        }
        if has_cycle(&j.precedence) {
            out.push(PrecedenceCycle { job: j.id.clone() });
        }
    }

    for op in &used_ops {
        let Some(demanded) = demands.get(op) else {
            out.push(MissingDemand { op: op.to_string() });
            continue;
        };
        for class in demanded {
            if !classes.contains(class) {
                out.push(UndeclaredClass {
                    op: op.to_string(),
                    class: class.to_string(),
                });
            } else if !inst
                .resources
                .iter()
                .any(|r| r.class == *class && r.capabilities.contains(*op))
            {
                out.push(NoCapableInstance {
                    op: op.to_string(),
                    class: class.to_string(),
                });
            }
        }
    }
    // Unused operations may still demand classes nobody declares.
    for (op, demanded) in &demands {
        if used_ops.contains(op) {
            continue;
        }
        for class in demanded {
            if !classes.contains(class) {
                out.push(UndeclaredClass {
                    op: op.to_string(),
                    class: class.to_string(),
                });
            }
        }
    }
    out
}

/// Finds a cycle in a relation given as ordered pairs; returns one of the
/// pairs lying on it.
pub(crate) fn find_cycle_edge(pairs: &BTreeSet<(String, String)>) -> Option<(String, String)> {
    let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (a, b) in pairs {
        succ.entry(a).or_default().push(b);
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: BTreeMap<&str, u8> = BTreeMap::new();
    fn visit<'a>(
        n: &'a str,
        succ: &BTreeMap<&'a str, Vec<&'a str>>,
        state: &mut BTreeMap<&'a str, u8>,
    ) -> Option<(&'a str, &'a str)> {
        state.insert(n, 1);
        for &m in succ.get(n).map(Vec::as_slice).unwrap_or(&[]) {
            match state.get(m).copied().unwrap_or(0) {
                1 => return Some((n, m)),
                0 => {
                    if let Some(e) = visit(m, succ, state) {
                        return Some(e);
                    }
                }
                _ => {}
            }
        }
        state.insert(n, 2);
        None
    }
    let nodes: Vec<&str> = succ.keys().copied().collect();
    for n in nodes {
        if state.get(n).copied().unwrap_or(0) == 0 {
            if let Some((a, b)) = visit(n, &succ, &mut state) {
                return Some((a.to_string(), b.to_string()));
            }
        }
    }
    None
}

fn has_cycle(pairs: &BTreeSet<(String, String)>) -> bool {
    find_cycle_edge(pairs).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(id: &str, ops: &[&str], prec: &[(&str, &str)], deadline: u32) -> JobSpec {
        JobSpec {
            id: id.into(),
            ops: ops.iter().map(|s| s.to_string()).collect(),
            precedence: prec
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            deadline,
        }
    }

    fn small() -> Instance {
        Instance {
            operations: vec![OperationSpec {
                id: "o1".into(),
                duration: 2,
            }],
            resources: vec![
                ResourceInstance {
                    class: "w".into(),
                    index: 1,
                    capabilities: ["o1".to_string()].into(),
                },
                ResourceInstance {
                    class: "m".into(),
                    index: 1,
                    capabilities: BTreeSet::new(),
                },
            ],
            demands: vec![Demand {
                op: "o1".into(),
                classes: ["w".to_string()].into(),
            }],
            jobs: vec![job("j", &["o1"], &[], 4)],
        }
    }

    #[test]
    fn valid_small_instance() {
        assert!(validate_instance(&small()).is_empty());
        assert_eq!(tasks(&small()), vec![TaskRef::new("j", "o1")]);
    }

    #[test]
    fn demanded_class_without_capable_instance() {
        let mut inst = small();
        inst.demands[0].classes.insert("m".into());
        assert_eq!(
            validate_instance(&inst),
            vec![InstanceViolation::NoCapableInstance {
                op: "o1".into(),
                class: "m".into()
            }]
        );
    }

    #[test]
    fn undeclared_job_op() {
        let mut inst = small();
        inst.jobs[0].ops.insert("o9".into());
        assert_eq!(
            validate_instance(&inst),
            vec![InstanceViolation::UnknownJobOp {
                job: "j".into(),
                op: "o9".into()
            }]
        );
    }

    #[test]
    fn cyclic_precedence() {
        let mut inst = small();
        inst.operations.push(OperationSpec {
            id: "o2".into(),
            duration: 1,
        });
        inst.demands.push(Demand {
            op: "o2".into(),
            classes: BTreeSet::new(),
        });
        inst.jobs[0] = job("j", &["o1", "o2"], &[("o1", "o2"), ("o2", "o1")], 4);
        assert_eq!(
            validate_instance(&inst),
            vec![InstanceViolation::PrecedenceCycle { job: "j".into() }]
        );
    }

    #[test]
    fn no_jobs_no_tasks() {
        let mut inst = small();
        inst.jobs.clear();
        assert!(tasks(&inst).is_empty());
    }
}
