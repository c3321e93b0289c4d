#![allow(dead_code)]

use std::collections::BTreeMap;

use mpfjss::generate::{generate, GenParams};
use mpfjss::schedule::{Assignment, Schedule};
use mpfjss::{parse_instance, Instance};

pub const EXAMPLE: &str = include_str!("../../data/fa_example.lp");

pub fn example() -> Instance {
    parse_instance(EXAMPLE).expect("example parses")
}

fn task(job: &str, op: &str, start: i64, res: &[(&str, u32)]) -> Assignment {
    Assignment {
        job: job.into(),
        op: op.into(),
        start,
        end: start + 1,
        resources: res.iter().map(|(c, i)| (c.to_string(), *i)).collect(),
    }
}

/// A hand-made schedule of the example with total tardiness 1; only the
/// third job is late.
pub fn example_schedule() -> Schedule {
    let assignments = vec![
        task("j1", "o1", 0, &[("w", 1)]),
        task("j1", "o2", 2, &[("w", 1)]),
        task("j1", "o4", 1, &[("m", 2), ("w", 2)]),
        task("j2", "o3", 1, &[("m", 1), ("w", 3)]),
        task("j2", "o4", 0, &[("m", 3), ("w", 2)]),
        task("j3", "o1", 1, &[("w", 1)]),
        task("j3", "o2", 3, &[("w", 3)]),
        task("j3", "o3", 0, &[("m", 1), ("w", 3)]),
        task("j3", "o5", 2, &[("m", 4), ("w", 2)]),
    ];
    let tardiness: BTreeMap<String, i64> = [("j1", 0), ("j2", 0), ("j3", 1)]
        .into_iter()
        .map(|(j, t)| (j.to_string(), t))
        .collect();
    Schedule {
        assignments,
        tardiness,
        total_tardiness: 1,
        proven_optimal: false,
    }
}

pub fn assignment_mut<'a>(s: &'a mut Schedule, job: &str, op: &str) -> &'a mut Assignment {
    s.assignments
        .iter_mut()
        .find(|a| a.job == job && a.op == op)
        .expect("task present")
}

/// At most three jobs of at most three operations of duration at most 3.
pub fn tiny(seed: u64) -> Instance {
    generate(&GenParams::tiny(), seed).expect("tiny params are valid")
}

/// A few more jobs than `tiny`, still small enough to optimize exactly.
pub fn small(seed: u64) -> Instance {
    let p = GenParams {
        op_types: 6,
        machines: 3,
        workers: 3,
        jobs: (3, 4),
        ops_per_job: (2, 3),
        duration: (1, 5),
        shift: 10,
        tight_fraction: 0.4,
        max_deadline_shifts: 1,
        worker_density: 0.5,
        machine_demand: 0.5,
        machine_density: 0.5,
        partial_order: None,
    };
    generate(&p, seed).expect("small params are valid")
}

/// From-scratch feasibility of `x - y <= k` constraints over `n` variables
/// (index `n` is the origin) by Bellman-Ford from a virtual source.
pub fn bellman_ford_feasible(n: usize, cons: &[(usize, usize, i64)]) -> bool {
    let mut dist = vec![0i64; n + 1];
    for _ in 0..=n + 1 {
        let mut changed = false;
        for &(x, y, k) in cons {
            if dist[x] + k < dist[y] {
                dist[y] = dist[x] + k;
                changed = true;
            }
        }
        if !changed {
            return true;
        }
    }
    false
}

/// Least value of every variable implied by its constraints against the
/// origin (index `n`), for a feasible system.
pub fn least_values(n: usize, cons: &[(usize, usize, i64)]) -> Vec<Option<i64>> {
    let mut dist: Vec<Option<i64>> = vec![None; n + 1];
    dist[n] = Some(0);
    for _ in 0..=n {
        for &(x, y, k) in cons {
            if let Some(dx) = dist[x] {
                if dist[y].is_none_or(|dy| dx + k < dy) {
                    dist[y] = Some(dx + k);
                }
            }
        }
    }
    dist[..n].iter().map(|d| d.map(|d| -d)).collect()
}

/// One step of a push/pop/assert script against the engine.
#[derive(Debug, Clone)]
pub enum DlOp {
    Push,
    Pop,
    Assert(usize, usize, i64),
}

/// Asserts `cons` into a fresh engine and compares with the oracles: verdict
/// against Bellman-Ford, solution against every constraint, lower bounds
/// against shortest paths.
pub fn check_dl_system(n: usize, cons: &[(usize, usize, i64)]) -> Result<(), String> {
    use mpfjss::dl::DlEngine;

    let mut dl = DlEngine::new();
    let mut vars: Vec<_> = (0..n).map(|i| dl.new_var(format!("x{i}"))).collect();
    vars.push(dl.zero());
    for &(x, y, k) in cons {
        dl.assert_upper(vars[x], vars[y], k);
    }
    compare(&dl, &vars, n, cons)
}

fn compare(
    dl: &mpfjss::dl::DlEngine,
    vars: &[mpfjss::dl::DlVar],
    n: usize,
    cons: &[(usize, usize, i64)],
) -> Result<(), String> {
    let expected = bellman_ford_feasible(n, cons);
    if dl.is_feasible() != expected {
        return Err(format!(
            "verdict {} but Bellman-Ford says {expected} for {cons:?}",
            dl.is_feasible()
        ));
    }
    if !expected {
        let cycle = dl.conflict().ok_or("no conflict reported")?;
        if cycle.iter().map(|c| c.k).sum::<i64>() >= 0 {
            return Err(format!("conflict {cycle:?} is not a negative cycle"));
        }
        return Ok(());
    }
    let sol = dl.solution().map_err(|e| e.to_string())?;
    let val = |i: usize| if i == n { 0 } else { sol[i] };
    for &(x, y, k) in cons {
        if val(x) - val(y) > k {
            return Err(format!("solution {sol:?} breaks x{x} - x{y} <= {k}"));
        }
    }
    let least = least_values(n, cons);
    for i in 0..n {
        if dl.lower_bound(vars[i]) != least[i] {
            return Err(format!(
                "lower bound of x{i}: {:?} vs {:?}",
                dl.lower_bound(vars[i]),
                least[i]
            ));
        }
        if let Some(l) = least[i] {
            if sol[i] != l {
                return Err(format!("x{i} = {} is not its least value {l}", sol[i]));
            }
        }
    }
    Ok(())
}

/// Runs a script and after every step compares the engine with a from-scratch
/// replay of the constraints still on the stack.
pub fn check_dl_script(n: usize, ops: &[DlOp]) -> Result<(), String> {
    use mpfjss::dl::DlEngine;

    let mut dl = DlEngine::new();
    let mut vars: Vec<_> = (0..n).map(|i| dl.new_var(format!("x{i}"))).collect();
    vars.push(dl.zero());
    let mut frames: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new()];
    for op in ops {
        match *op {
            DlOp::Push => {
                dl.push();
                frames.push(Vec::new());
            }
            DlOp::Pop => {
                if frames.len() > 1 {
                    dl.pop().map_err(|e| e.to_string())?;
                    frames.pop();
                } else if dl.pop().is_ok() {
                    return Err("pop at level 0 succeeded".into());
                }
            }
            DlOp::Assert(x, y, k) => {
                dl.assert_upper(vars[x], vars[y], k);
                frames.last_mut().unwrap().push((x, y, k));
            }
        }
        let live: Vec<_> = frames.iter().flatten().copied().collect();
        if dl.level() != frames.len() - 1 || dl.num_constraints() != live.len() {
            return Err("level or constraint count out of sync".into());
        }
        compare(&dl, &vars, n, &live)?;
    }
    Ok(())
}

/// A random system: up to `max_vars` variables, up to `max_cons` constraints
/// with weights in [-10, 10]; about one constraint in five involves the origin.
pub fn random_dl_system(
    rng: &mut impl rand::Rng,
    max_vars: usize,
    max_cons: usize,
) -> (usize, Vec<(usize, usize, i64)>) {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(0..=max_cons);
    let pick = |rng: &mut dyn rand::RngCore| {
        if rand::Rng::gen_bool(rng, 0.1) {
            n
        } else {
            rand::Rng::gen_range(rng, 0..n)
        }
    };
    let cons = (0..m)
        .map(|_| {
            let x = pick(rng);
            let y = pick(rng);
            (x, y, rng.gen_range(-10..=10))
        })
        .collect();
    (n, cons)
}

pub fn random_dl_script(
    rng: &mut impl rand::Rng,
    max_vars: usize,
    len: usize,
) -> (usize, Vec<DlOp>) {
    let n = rng.gen_range(1..=max_vars);
    let ops = (0..len)
        .map(|_| match rng.gen_range(0..10) {
            0 | 1 => DlOp::Push,
            2 => DlOp::Pop,
            _ => {
                let x = rng.gen_range(0..=n);
                let y = rng.gen_range(0..=n);
                DlOp::Assert(x, y, rng.gen_range(-10..=10))
            }
        })
        .collect();
    (n, ops)
}
