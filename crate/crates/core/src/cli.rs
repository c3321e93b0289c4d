//! Command-line front end.
//!
//! Exit codes: 0 success, 1 schedule violations, 2 usage error, 3 unreadable
//! or malformed input, 4 instance cannot be scheduled, 5 time budget
//! exhausted before an optimal schedule.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{run_bench, write_csv, BenchRecord};
use crate::bound::{solve_with_strategy, Status, Strategy, StrategyConfig};
use crate::error::SolveError;
use crate::facts::{load_instance, to_facts};
use crate::generate::{generate, split_day, GenParams};
use crate::schedule::Schedule;
use crate::validator::check_schedule;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_UNSOLVABLE: i32 = 4;
pub const EXIT_TIMEOUT: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "mpfjss",
    version,
    about = "Tardiness-minimizing scheduler for multi-resource flexible job shops"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Single,
    Inc,
    Exp,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Single => Strategy::Single,
            StrategyArg::Inc => Strategy::Inc,
            StrategyArg::Exp => Strategy::Exp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, clap::Args)]
pub struct SolveFlags {
    #[arg(long, value_enum, default_value = "exp")]
    pub strategy: StrategyArg,
    /// Probe step of the incremental strategy, in minutes.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub window: u64,
    /// Wall-clock budget in seconds, shared by bound search and optimization.
    #[arg(long, default_value_t = 7200.0)]
    pub timeout: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SolveFlags {
    fn config(&self, strategy: Strategy) -> StrategyConfig {
        StrategyConfig {
            strategy,
            window: self.window,
            timeout: Duration::from_secs_f64(self.timeout.max(0.0)),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and print a report.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Solve every instance file in a directory and write CSV rows.
    Bench {
        dir: PathBuf,
        /// Strategies to run; all three when omitted.
        #[arg(long = "strategies", value_enum, value_delimiter = ',')]
        strategies: Vec<StrategyArg>,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        window: u64,
        #[arg(long, default_value_t = 7200.0)]
        timeout: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Parallel solver runs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Write synthetic day instances as fact files.
    ///
    /// Defaults: 50 op types, 75 machines, 45 workers, 30 to 50 jobs of 2 to 6
    /// operations lasting 15 to 120 minutes, a quarter of the jobs with a
    /// deadline below their serial length, the rest due within three 480
    /// minute shifts.
    Generate {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        days: usize,
        /// Also write sub-instances with the first k, 2k, ... jobs of each day
        /// into `<output>/split`.
        #[arg(long)]
        split: Option<usize>,
        /// Drop each ordered pair of a job's operations with this probability
        /// instead of emitting a strict chain.
        #[arg(long)]
        partial_order: Option<f64>,
        #[arg(long)]
        min_jobs: Option<usize>,
        #[arg(long)]
        max_jobs: Option<usize>,
        /// Output directory.
        #[arg(long, short, default_value = ".")]
        output: PathBuf,
    },
    /// Check a schedule (JSON) against an instance.
    Validate {
        instance: PathBuf,
        schedule: PathBuf,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            code
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Solve {
            instance,
            flags,
            output,
            format,
        } => solve(&instance, &flags, output.as_deref(), format, out),
        Command::Bench {
            dir,
            strategies,
            window,
            timeout,
            seed,
            jobs,
            output,
        } => bench(
            &dir,
            &strategies,
            window,
            timeout,
            seed,
            jobs,
            output.as_deref(),
            out,
        ),
        Command::Generate {
            seed,
            days,
            split,
            partial_order,
            min_jobs,
            max_jobs,
            output,
        } => {
            let mut p = GenParams {
                partial_order,
                ..GenParams::default()
            };
            if let Some(n) = min_jobs {
                p.jobs.0 = n;
            }
            if let Some(n) = max_jobs {
                p.jobs.1 = n;
            }
            generate_days(&p, seed, days, split, &output, out)
        }
        Command::Validate { instance, schedule } => validate(&instance, &schedule, out),
    };
    match result {
        Ok(code) => code,
        Err((code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

type CmdResult = Result<i32, (i32, String)>;

fn input_err(e: impl std::fmt::Display) -> (i32, String) {
    (EXIT_INPUT, e.to_string())
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<(), (i32, String)> {
    match output {
        Some(p) => fs::write(p, text)
            .map_err(|e| (EXIT_INPUT, format!("cannot write {}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(input_err),
    }
}

fn solve(
    path: &Path,
    flags: &SolveFlags,
    output: Option<&Path>,
    format: Format,
    out: &mut dyn Write,
) -> CmdResult {
    let inst = load_instance(path).map_err(input_err)?;
    let report = match solve_with_strategy(&inst, &flags.config(flags.strategy.into())) {
        Ok(r) => r,
        Err(e @ (SolveError::Unsolvable(_) | SolveError::InvalidInstance(_))) => {
            return Err((EXIT_UNSOLVABLE, e.to_string()))
        }
        Err(e) => return Err((EXIT_USAGE, e.to_string())),
    };
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => {
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let mut buf = Vec::new();
            write_csv(
                &[BenchRecord::from_report(name, inst.jobs.len(), &report)],
                &mut buf,
            )
            .map_err(input_err)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
    };
    emit(&text, output, out)?;
    Ok(match report.status {
        Status::Optimal => EXIT_OK,
        _ => EXIT_TIMEOUT,
    })
}

#[allow(clippy::too_many_arguments)]
fn bench(
    dir: &Path,
    strategies: &[StrategyArg],
    window: u64,
    timeout: f64,
    seed: u64,
    jobs: usize,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let strategies: Vec<Strategy> = if strategies.is_empty() {
        Strategy::ALL.to_vec()
    } else {
        strategies.iter().map(|&s| s.into()).collect()
    };
    let base = StrategyConfig {
        strategy: Strategy::Exp,
        window,
        timeout: Duration::from_secs_f64(timeout.max(0.0)),
        seed,
    };
    let rows = run_bench(dir, &strategies, &base, jobs)
        .map_err(|e| (EXIT_INPUT, format!("{}: {e}", dir.display())))?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).map_err(input_err)?;
    emit(&String::from_utf8(buf).expect("csv is utf-8"), output, out)?;
    Ok(EXIT_OK)
}

fn generate_days(
    p: &GenParams,
    seed: u64,
    days: usize,
    split: Option<usize>,
    dir: &Path,
    out: &mut dyn Write,
) -> CmdResult {
    p.validate().map_err(|e| (EXIT_USAGE, e.to_string()))?;
    let write = |path: PathBuf, text: String, out: &mut dyn Write| -> Result<(), (i32, String)> {
        fs::write(&path, text)
            .map_err(|e| (EXIT_INPUT, format!("cannot write {}: {e}", path.display())))?;
        writeln!(out, "{}", path.display()).map_err(input_err)
    };
    fs::create_dir_all(dir).map_err(input_err)?;
    let split_dir = dir.join("split");
    if split.is_some() {
        fs::create_dir_all(&split_dir).map_err(input_err)?;
    }
    for d in 0..days {
        let day =
            generate(p, seed.wrapping_add(d as u64)).map_err(|e| (EXIT_USAGE, e.to_string()))?;
        let stem = format!("day{:02}", d + 1);
        write(dir.join(format!("{stem}.lp")), to_facts(&day), out)?;
        if let Some(step) = split {
            for sub in split_day(&day, step) {
                let name = format!("{stem}_j{:02}.lp", sub.jobs.len());
                write(split_dir.join(name), to_facts(&sub), out)?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn validate(inst_path: &Path, sched_path: &Path, out: &mut dyn Write) -> CmdResult {
    let inst = load_instance(inst_path).map_err(input_err)?;
    let text = fs::read_to_string(sched_path)
        .map_err(|e| (EXIT_INPUT, format!("{}: {e}", sched_path.display())))?;
    // A full solve report is accepted as well as a bare schedule.
    let value: serde_json::Value = serde_json::from_str(&text).map_err(input_err)?;
    let sched_value = match value.get("schedule") {
        Some(s) if value.get("assignments").is_none() => s.clone(),
        _ => value,
    };
    let sched: Schedule = serde_json::from_value(sched_value).map_err(input_err)?;
    let violations = check_schedule(&inst, &sched);
    let json = serde_json::to_string_pretty(&violations).expect("violations serialize");
    writeln!(out, "{json}").map_err(input_err)?;
    Ok(if violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_VIOLATIONS
    })
}
