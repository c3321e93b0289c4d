//! Seeded synthetic lab instances and the sub-instance splitting protocol.
//!
//! Two resource classes are generated: workers (`w`), demanded by every
//! operation, and machines (`m`), demanded by a share of the operations.
//! Identifiers are zero-padded so that lexicographic order is numeric order.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{Demand, Instance, JobSpec, OperationSpec, ResourceInstance};

pub const WORKER: &str = "w";
pub const MACHINE: &str = "m";

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub op_types: usize,
    pub machines: usize,
    pub workers: usize,
    /// Inclusive range of the number of jobs.
    pub jobs: (usize, usize),
    /// Inclusive range of operations per job.
    pub ops_per_job: (usize, usize),
    /// Inclusive range of operation durations in minutes.
    pub duration: (u32, u32),
    pub shift: u32,
    /// Share of jobs whose deadline is shorter than their serial length.
    pub tight_fraction: f64,
    /// Deadlines of the other jobs lie within this many shifts.
    pub max_deadline_shifts: u32,
    /// Probability that a worker is trained for a given operation.
    pub worker_density: f64,
    /// Probability that an operation needs a machine.
    pub machine_demand: f64,
    /// Probability that a machine can run a given machine operation.
    pub machine_density: f64,
    /// `None` gives a strict total order per job. `Some(p)` starts from all
    /// ordered pairs of a random sequence and drops each with probability `p`.
    pub partial_order: Option<f64>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            op_types: 50,
            machines: 75,
            workers: 45,
            jobs: (30, 50),
            ops_per_job: (2, 6),
            duration: (15, 120),
            shift: 480,
            tight_fraction: 0.25,
            max_deadline_shifts: 3,
            worker_density: 0.2,
            machine_demand: 0.6,
            machine_density: 0.05,
            partial_order: None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("invalid generator parameters: {0}")]
pub struct GenError(pub String);

impl GenParams {
    /// At most three jobs of at most three short operations, for exhaustive
    /// cross-checks.
    pub fn tiny() -> Self {
        GenParams {
            op_types: 4,
            machines: 2,
            workers: 2,
            jobs: (1, 3),
            ops_per_job: (1, 3),
            duration: (1, 3),
            shift: 8,
            tight_fraction: 0.3,
            max_deadline_shifts: 1,
            worker_density: 0.5,
            machine_demand: 0.5,
            machine_density: 0.5,
            partial_order: None,
        }
    }

    pub fn with_jobs(mut self, n: usize) -> Self {
        self.jobs = (n, n);
        self
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError(m.to_string()));
        if self.op_types == 0 || self.workers == 0 {
            return bad("op_types and workers must be positive");
        }
        if self.machines == 0 && self.machine_demand > 0.0 {
            return bad("machine operations need at least one machine");
        }
        if self.jobs.0 > self.jobs.1 {
            return bad("job range is empty");
        }
        if self.ops_per_job.0 == 0 || self.ops_per_job.0 > self.ops_per_job.1 {
            return bad("ops_per_job range must be non-empty and start at 1 or more");
        }
        if self.ops_per_job.1 > self.op_types {
            return bad("a job cannot have more operations than there are op types");
        }
        if self.duration.0 == 0 || self.duration.0 > self.duration.1 {
            return bad("duration range must be non-empty and positive");
        }
        if self.shift == 0 || self.max_deadline_shifts == 0 {
            return bad("shift and max_deadline_shifts must be positive");
        }
        let probs = [
            self.tight_fraction,
            self.worker_density,
            self.machine_demand,
            self.machine_density,
            self.partial_order.unwrap_or(0.0),
        ];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("probabilities must lie in [0, 1]");
        }
        Ok(())
    }
}

fn width(n: usize) -> usize {
    n.max(1).to_string().len().max(2)
}

/// Draws an instance. A pure function of `(params, seed)`.
pub fn generate(params: &GenParams, seed: u64) -> Result<Instance, GenError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ow = width(params.op_types);
    let op_id = |i: usize| format!("o{:0ow$}", i + 1);

    let operations: Vec<OperationSpec> = (0..params.op_types)
        .map(|i| OperationSpec {
            id: op_id(i),
            duration: rng.gen_range(params.duration.0..=params.duration.1),
        })
        .collect();
    let needs_machine: Vec<bool> = (0..params.op_types)
        .map(|_| params.machines > 0 && rng.gen_bool(params.machine_demand))
        .collect();

    let mut worker_caps = vec![BTreeSet::new(); params.workers];
    let mut machine_caps = vec![BTreeSet::new(); params.machines];
    for (i, op) in operations.iter().enumerate() {
        let mut any = false;
        for caps in worker_caps.iter_mut() {
            if rng.gen_bool(params.worker_density) {
                caps.insert(op.id.clone());
                any = true;
            }
        }
        if !any {
            let k = rng.gen_range(0..params.workers);
            worker_caps[k].insert(op.id.clone());
        }
        if needs_machine[i] {
            let mut any = false;
            for caps in machine_caps.iter_mut() {
                if rng.gen_bool(params.machine_density) {
                    caps.insert(op.id.clone());
                    any = true;
                }
            }
            if !any {
                let k = rng.gen_range(0..params.machines);
                machine_caps[k].insert(op.id.clone());
            }
        }
    }
    // The fact format lists an instance only through its capabilities.
    let machine_ops: Vec<usize> = (0..params.op_types).filter(|&i| needs_machine[i]).collect();
    for caps in worker_caps.iter_mut().filter(|c| c.is_empty()) {
        caps.insert(op_id(rng.gen_range(0..params.op_types)));
    }
    for caps in machine_caps.iter_mut().filter(|c| c.is_empty()) {
        let i = machine_ops
            .choose(&mut rng)
            .copied()
            .unwrap_or_else(|| rng.gen_range(0..params.op_types));
        caps.insert(op_id(i));
    }
    let mut resources = Vec::new();
    for (class, caps) in [(WORKER, worker_caps), (MACHINE, machine_caps)] {
        for (i, capabilities) in caps.into_iter().enumerate() {
            resources.push(ResourceInstance {
                class: class.to_string(),
                index: i as u32 + 1,
                capabilities,
            });
        }
    }
    let demands = operations
        .iter()
        .zip(&needs_machine)
        .map(|(op, &m)| Demand {
            op: op.id.clone(),
            classes: if m {
                [WORKER, MACHINE].iter().map(|c| c.to_string()).collect()
            } else {
                [WORKER.to_string()].into_iter().collect()
            },
        })
        .collect();

    let n_jobs = rng.gen_range(params.jobs.0..=params.jobs.1);
    let jw = width(n_jobs);
    let horizon = params.shift * params.max_deadline_shifts;
    let all_ops: Vec<usize> = (0..params.op_types).collect();
    let mut jobs = Vec::with_capacity(n_jobs);
    for j in 0..n_jobs {
        let k = rng.gen_range(params.ops_per_job.0..=params.ops_per_job.1);
        let seq: Vec<usize> = all_ops.choose_multiple(&mut rng, k).copied().collect();
        let mut precedence = BTreeSet::new();
        match params.partial_order {
            None => {
                for w in seq.windows(2) {
                    precedence.insert((op_id(w[0]), op_id(w[1])));
                }
            }
            Some(p) => {
                for a in 0..seq.len() {
                    for b in a + 1..seq.len() {
                        if !rng.gen_bool(p) {
                            precedence.insert((op_id(seq[a]), op_id(seq[b])));
                        }
                    }
                }
            }
        }
        let serial: u32 = seq.iter().map(|&i| operations[i].duration).sum();
        let deadline = if rng.gen_bool(params.tight_fraction) {
            rng.gen_range(serial / 2..serial)
        } else {
            rng.gen_range(serial..=horizon.max(serial))
        };
        jobs.push(JobSpec {
            id: format!("j{:0jw$}", j + 1),
            ops: seq.iter().map(|&i| op_id(i)).collect(),
            precedence,
            deadline,
        });
    }

    let mut inst = Instance {
        operations,
        resources,
        demands,
        jobs,
    };
    inst.canonicalize();
    Ok(inst)
}

/// Sub-instances with the first `step`, `2 * step`, ... jobs in id order,
/// ending with the full instance. All share the full resource pool.
pub fn split_day(inst: &Instance, step: usize) -> Vec<Instance> {
    let step = step.max(1);
    let mut ids: Vec<&str> = inst.jobs.iter().map(|j| j.id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    let n = ids.len();
    let mut sizes: Vec<usize> = (1..).map(|k| k * step).take_while(|&s| s < n).collect();
    if n > 0 {
        sizes.push(n);
    }
    sizes
        .into_iter()
        .map(|s| inst.with_jobs(ids[..s].iter().copied()))
        .collect()
}
