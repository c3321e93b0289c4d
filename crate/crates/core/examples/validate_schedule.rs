//! Checks a solver schedule, then breaks it in a few ways.
//!
//! cargo run --example validate_schedule

use mpfjss::bound::{solve_with_strategy, StrategyConfig};
use mpfjss::parse_instance;
use mpfjss::validator::{check_schedule, total_tardiness};

fn main() {
    let inst = parse_instance(include_str!("../data/fa_example.lp")).unwrap();
    let good = solve_with_strategy(&inst, &StrategyConfig::default())
        .unwrap()
        .schedule
        .unwrap();
    println!(
        "solver schedule: {} violations, T = {}",
        check_schedule(&inst, &good).len(),
        total_tardiness(&inst, &good)
    );

    let mut shifted = good.clone();
    let last = shifted
        .assignments
        .iter_mut()
        .max_by_key(|a| a.start)
        .unwrap();
    last.start = 0;
    last.end = 0;
    println!("\nlast task pulled to time 0 with a zero-length interval:");
    for v in check_schedule(&inst, &shifted) {
        println!("  {v}");
    }

    let mut stripped = good.clone();
    stripped.assignments[0].resources.clear();
    stripped.total_tardiness += 1;
    println!("\nfirst task without resources, total misreported:");
    println!(
        "{}",
        serde_json::to_string_pretty(&check_schedule(&inst, &stripped)).unwrap()
    );
}
