//! Benchmark sweeps over a directory of instance files.
//!
//! One CSV row per (instance, strategy):
//! `instance,jobs,strategy,verdict,search_s,opt_s,total_tardiness,cap`.
//! Empty `total_tardiness` or `cap` cells mean no value was reached.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bound::{solve_with_strategy, SolveReport, Status, Strategy, StrategyConfig};
use crate::facts::load_instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchVerdict {
    Optimal,
    Incumbent,
    BoundNotFound,
    Timeout,
    /// The instance could not be read or cannot be scheduled.
    Error,
}

impl From<Status> for BenchVerdict {
    fn from(s: Status) -> Self {
        match s {
            Status::Optimal => BenchVerdict::Optimal,
            Status::Incumbent => BenchVerdict::Incumbent,
            Status::BoundNotFound => BenchVerdict::BoundNotFound,
            Status::Timeout => BenchVerdict::Timeout,
        }
    }
}

impl fmt::Display for BenchVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchVerdict::Optimal => "optimal",
            BenchVerdict::Incumbent => "incumbent",
            BenchVerdict::BoundNotFound => "bound-not-found",
            BenchVerdict::Timeout => "timeout",
            BenchVerdict::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub jobs: usize,
    pub strategy: Strategy,
    pub verdict: BenchVerdict,
    pub search_s: f64,
    pub opt_s: f64,
    pub total_tardiness: Option<i64>,
    pub cap: Option<u64>,
}

impl BenchRecord {
    pub fn from_report(instance: impl Into<String>, jobs: usize, r: &SolveReport) -> Self {
        BenchRecord {
            instance: instance.into(),
            jobs,
            strategy: r.strategy,
            verdict: r.status.into(),
            search_s: r.search_seconds,
            opt_s: r.opt_seconds,
            total_tardiness: r.total_tardiness,
            cap: r.cap,
        }
    }
}

/// Instance files (`.lp` or `.json`) directly inside `dir`, sorted by name.
pub fn instance_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file() && matches!(p.extension().and_then(|e| e.to_str()), Some("lp" | "json"))
        })
        .collect();
    files.sort();
    Ok(files)
}

pub fn run_one(path: &Path, cfg: &StrategyConfig) -> BenchRecord {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let error = |jobs| BenchRecord {
        instance: name.clone(),
        jobs,
        strategy: cfg.strategy,
        verdict: BenchVerdict::Error,
        search_s: 0.0,
        opt_s: 0.0,
        total_tardiness: None,
        cap: None,
    };
    let Ok(inst) = load_instance(path) else {
        return error(0);
    };
    match solve_with_strategy(&inst, cfg) {
        Ok(r) => BenchRecord::from_report(name.clone(), inst.jobs.len(), &r),
        Err(_) => error(inst.jobs.len()),
    }
}

/// Solves every instance file in `dir` with every strategy on `threads`
/// worker threads. Failures become `error` rows. Rows are sorted by job
/// count, then instance name, then strategy.
pub fn run_bench(
    dir: &Path,
    strategies: &[Strategy],
    base: &StrategyConfig,
    threads: usize,
) -> std::io::Result<Vec<BenchRecord>> {
    use rayon::prelude::*;

    let files = instance_files(dir)?;
    let work: Vec<(PathBuf, StrategyConfig)> = files
        .iter()
        .flat_map(|f| {
            strategies.iter().map(move |&s| {
                (
                    f.clone(),
                    StrategyConfig {
                        strategy: s,
                        ..base.clone()
                    },
                )
            })
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(std::io::Error::other)?;
    let mut rows: Vec<BenchRecord> =
        pool.install(|| work.par_iter().map(|(f, cfg)| run_one(f, cfg)).collect());
    rows.sort_by(|a, b| (a.jobs, &a.instance, a.strategy).cmp(&(b.jobs, &b.instance, b.strategy)));
    Ok(rows)
}

pub const CSV_HEADER: [&str; 8] = [
    "instance",
    "jobs",
    "strategy",
    "verdict",
    "search_s",
    "opt_s",
    "total_tardiness",
    "cap",
];

pub fn write_csv<W: Write>(rows: &[BenchRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.jobs.to_string(),
            r.strategy.to_string(),
            r.verdict.to_string(),
            format!("{:.3}", r.search_s),
            format!("{:.3}", r.opt_s),
            r.total_tardiness.map(|t| t.to_string()).unwrap_or_default(),
            r.cap.map(|c| c.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
