//! Generates sub-instances into a temporary directory and sweeps them with
//! all strategies, printing the CSV.
//!
//! cargo run --release --example bench_sweep -- [timeout_secs]

use std::time::Duration;

use mpfjss::bench::{run_bench, write_csv};
use mpfjss::bound::{Strategy, StrategyConfig};
use mpfjss::generate::{generate, split_day, GenParams};
use mpfjss::to_facts;

fn main() {
    let secs: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2.0);
    let dir = std::env::temp_dir().join(format!("mpfjss-bench-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let day = generate(&GenParams::default().with_jobs(12), 3).unwrap();
    for sub in split_day(&day, 5) {
        std::fs::write(
            dir.join(format!("day01_j{:02}.lp", sub.jobs.len())),
            to_facts(&sub),
        )
        .unwrap();
    }
    let base = StrategyConfig::default().timeout(Duration::from_secs_f64(secs));
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let rows = run_bench(&dir, &Strategy::ALL, &base, threads).unwrap();
    write_csv(&rows, std::io::stdout()).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
}
