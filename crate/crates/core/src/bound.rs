//! Locating a uniform per-job tardiness cap, then optimizing under it.
//!
//! The probe drivers are generic over the feasibility oracle so that probe
//! sequences can be checked against scripted verdicts.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::instance::Instance;
use crate::schedule::Schedule;
use crate::scheduler::{Decision, SearchOptions, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Single,
    Inc,
    Exp,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Single, Strategy::Inc, Strategy::Exp];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Single => "single",
            Strategy::Inc => "inc",
            Strategy::Exp => "exp",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(Strategy::Single),
            "inc" => Ok(Strategy::Inc),
            "exp" => Ok(Strategy::Exp),
            other => Err(format!(
                "unknown strategy `{other}` (expected single, inc or exp)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub strategy: Strategy,
    /// Step of the incremental probe ladder, in minutes.
    pub window: u64,
    pub timeout: Duration,
    /// Recorded with every report. The solver itself is deterministic.
    pub seed: u64,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            strategy: Strategy::Exp,
            window: 20,
            timeout: Duration::from_secs(7200),
            seed: 0,
        }
    }
}

impl StrategyConfig {
    pub fn new(strategy: Strategy) -> Self {
        StrategyConfig {
            strategy,
            ..Default::default()
        }
    }

    pub fn window(mut self, w: u64) -> Self {
        self.window = w;
        self
    }

    pub fn timeout(mut self, t: Duration) -> Self {
        self.timeout = t;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Sat,
    Unsat,
    /// Budget exhausted before the probe was decided.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub bound: u64,
    pub verdict: Verdict,
    pub seconds: f64,
}

/// Outcome of a probe driver: the cap it settled on, if any, and the probes in
/// the order they were made.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeRun {
    pub cap: Option<u64>,
    pub log: Vec<(u64, Verdict)>,
    /// True when the driver stopped on an `Unknown` verdict.
    pub interrupted: bool,
}

/// Probes `0, w, 2w, ...` until the first `Sat`. Stops with no cap once a
/// probe at or beyond `limit` fails.
pub fn incremental_probes(w: u64, limit: u64, mut probe: impl FnMut(u64) -> Verdict) -> ProbeRun {
    assert!(w >= 1, "window must be positive");
    let mut log = Vec::new();
    let mut b = 0u64;
    loop {
        let v = probe(b);
        log.push((b, v));
        match v {
            Verdict::Sat => {
                return ProbeRun {
                    cap: Some(b),
                    log,
                    interrupted: false,
                }
            }
            Verdict::Unknown => {
                return ProbeRun {
                    cap: None,
                    log,
                    interrupted: true,
                }
            }
            Verdict::Unsat if b >= limit => {
                return ProbeRun {
                    cap: None,
                    log,
                    interrupted: false,
                }
            }
            Verdict::Unsat => b = b.saturating_add(w),
        }
    }
}

/// Probes `0`, then `1, 2, 4, ...` (clamped to `limit`) until the first
/// `Sat`, then bisects between the last `Unsat` and that cap. The returned
/// cap is the smallest `Sat` one provided verdicts are monotone.
///
/// If the bisection is interrupted, the smallest `Sat` cap seen so far is
/// returned with `interrupted` set.
pub fn exponential_probes(limit: u64, mut probe: impl FnMut(u64) -> Verdict) -> ProbeRun {
    let mut log = Vec::new();
    let mut ask = |b: u64, log: &mut Vec<(u64, Verdict)>| {
        let v = probe(b);
        log.push((b, v));
        v
    };
    match ask(0, &mut log) {
        Verdict::Sat => {
            return ProbeRun {
                cap: Some(0),
                log,
                interrupted: false,
            }
        }
        Verdict::Unknown => {
            return ProbeRun {
                cap: None,
                log,
                interrupted: true,
            }
        }
        Verdict::Unsat => {}
    }
    let mut lo = 0u64;
    let mut step = 1u64;
    let hi = loop {
        let b = step.min(limit.max(1));
        match ask(b, &mut log) {
            Verdict::Sat => break b,
            Verdict::Unknown => {
                return ProbeRun {
                    cap: None,
                    log,
                    interrupted: true,
                }
            }
            Verdict::Unsat if b >= limit => {
                return ProbeRun {
                    cap: None,
                    log,
                    interrupted: false,
                }
            }
            Verdict::Unsat => {
                lo = b;
                step = step.saturating_mul(2);
            }
        }
    };
    let mut hi = hi;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match ask(mid, &mut log) {
            Verdict::Sat => hi = mid,
            Verdict::Unsat => lo = mid,
            Verdict::Unknown => {
                return ProbeRun {
                    cap: Some(hi),
                    log,
                    interrupted: true,
                }
            }
        }
    }
    ProbeRun {
        cap: Some(hi),
        log,
        interrupted: false,
    }
}

/// Sum of durations over all tasks. Every job fits under this cap in a serial
/// schedule, so it is always satisfiable for a structurally valid instance.
pub fn single_shot_bound(inst: &Instance) -> u64 {
    inst.jobs
        .iter()
        .flat_map(|j| j.ops.iter())
        .filter_map(|op| inst.operation(op))
        .map(|o| u64::from(o.duration))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// The schedule is proven optimal under the cap.
    Optimal,
    /// The budget ran out during optimization; the schedule is the best found.
    Incumbent,
    /// The budget ran out before any cap was found satisfiable.
    BoundNotFound,
    /// A cap was found but no schedule is available.
    Timeout,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Incumbent => "incumbent",
            Status::BoundNotFound => "bound-not-found",
            Status::Timeout => "timeout",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub strategy: Strategy,
    pub cap: Option<u64>,
    /// Lower edge `cap - window` of the incremental strategy's last window.
    /// Informational only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_floor: Option<u64>,
    pub probes: Vec<Probe>,
    pub search_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub strategy: Strategy,
    pub window: u64,
    pub seed: u64,
    pub cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_floor: Option<u64>,
    pub probes: Vec<Probe>,
    pub search_seconds: f64,
    pub opt_seconds: f64,
    pub total_tardiness: Option<i64>,
    pub proven_optimal: bool,
    pub status: Status,
    pub schedule: Option<Schedule>,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn bound_phase(
    solver: &Solver,
    cfg: &StrategyConfig,
    deadline: Instant,
) -> (BoundResult, Option<Schedule>) {
    let started = Instant::now();
    let limit = solver.model().total_work().max(0) as u64;
    let opts = SearchOptions {
        deadline: Some(deadline),
        ..Default::default()
    };
    let mut probes = Vec::new();
    let mut witness: Option<(u64, Schedule)> = None;
    let mut probe = |b: u64| {
        let t = Instant::now();
        let verdict = if Instant::now() >= deadline {
            Verdict::Unknown
        } else {
            match solver.decide(b, &opts) {
                Decision::Sat(s) => {
                    if witness.as_ref().is_none_or(|(wb, _)| b < *wb) {
                        witness = Some((b, s));
                    }
                    Verdict::Sat
                }
                Decision::Unsat => Verdict::Unsat,
                Decision::Unknown => Verdict::Unknown,
            }
        };
        probes.push(Probe {
            bound: b,
            verdict,
            seconds: t.elapsed().as_secs_f64(),
        });
        verdict
    };
    let (cap, window_floor) = match cfg.strategy {
        Strategy::Single => (Some(limit), None),
        Strategy::Inc => {
            let run = incremental_probes(cfg.window.max(1), limit, &mut probe);
            (run.cap, run.cap.map(|c| c.saturating_sub(cfg.window)))
        }
        Strategy::Exp => (exponential_probes(limit, &mut probe).cap, None),
    };
    let witness = witness.filter(|(b, _)| Some(*b) == cap).map(|(_, s)| s);
    (
        BoundResult {
            strategy: cfg.strategy,
            cap,
            window_floor,
            probes,
            search_seconds: started.elapsed().as_secs_f64(),
        },
        witness,
    )
}

/// Runs the configured bound phase and then optimizes under the cap it
/// found. Both phases draw on one wall-clock budget.
pub fn solve_with_strategy(
    inst: &Instance,
    cfg: &StrategyConfig,
) -> Result<SolveReport, SolveError> {
    if cfg.window == 0 {
        return Err(SolveError::InvalidConfig(
            "window must be at least 1".into(),
        ));
    }
    let solver = Solver::new(inst)?;
    let deadline = Instant::now() + cfg.timeout;
    let (bound, witness) = bound_phase(&solver, cfg, deadline);

    let opt_started = Instant::now();
    let (schedule, proven_optimal, status) = match bound.cap {
        None => (None, false, Status::BoundNotFound),
        Some(cap) => {
            let opts = SearchOptions {
                deadline: Some(deadline),
                ..Default::default()
            };
            let opt = if Instant::now() < deadline {
                solver.optimize(cap, &opts, witness.as_ref())
            } else {
                crate::scheduler::Optimum {
                    schedule: None,
                    proven_optimal: false,
                }
            };
            let schedule = opt.schedule.or(witness);
            let status = match (&schedule, opt.proven_optimal) {
                (Some(_), true) => Status::Optimal,
                (Some(_), false) => Status::Incumbent,
                (None, _) => Status::Timeout,
            };
            (
                schedule,
                opt.proven_optimal && status == Status::Optimal,
                status,
            )
        }
    };
    let opt_seconds = if bound.cap.is_some() {
        opt_started.elapsed().as_secs_f64()
    } else {
        0.0
    };
    Ok(SolveReport {
        strategy: cfg.strategy,
        window: cfg.window,
        seed: cfg.seed,
        cap: bound.cap,
        window_floor: bound.window_floor,
        probes: bound.probes,
        search_seconds: bound.search_seconds,
        opt_seconds,
        total_tardiness: schedule.as_ref().map(|s| s.total_tardiness),
        proven_optimal,
        status,
        schedule,
    })
}

/// Bound phase of the incremental strategy alone.
pub fn incremental_bound(
    inst: &Instance,
    w: u64,
    timeout: Duration,
) -> Result<BoundResult, SolveError> {
    bound_only(
        inst,
        &StrategyConfig::new(Strategy::Inc)
            .window(w)
            .timeout(timeout),
    )
}

/// Bound phase of the exponential strategy alone.
pub fn exponential_bound(inst: &Instance, timeout: Duration) -> Result<BoundResult, SolveError> {
    bound_only(inst, &StrategyConfig::new(Strategy::Exp).timeout(timeout))
}

fn bound_only(inst: &Instance, cfg: &StrategyConfig) -> Result<BoundResult, SolveError> {
    if cfg.window == 0 {
        return Err(SolveError::InvalidConfig(
            "window must be at least 1".into(),
        ));
    }
    let solver = Solver::new(inst)?;
    Ok(bound_phase(&solver, cfg, Instant::now() + cfg.timeout).0)
}
