//! Draws a lab day and splits it into growing sub-instances.
//!
//! cargo run --example generate_and_split -- [seed]

use mpfjss::generate::{generate, split_day, GenParams};
use mpfjss::instance::tasks;
use mpfjss::to_facts;

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(42);
    let day = generate(&GenParams::default(), seed).unwrap();
    let count = |c: &str| day.resources.iter().filter(|r| r.class == c).count();
    println!(
        "seed {seed}: {} jobs, {} tasks, {} workers, {} machines",
        day.jobs.len(),
        tasks(&day).len(),
        count("w"),
        count("m")
    );
    for sub in split_day(&day, 5) {
        println!(
            "  sub-instance with {:>2} jobs, {:>3} tasks",
            sub.jobs.len(),
            tasks(&sub).len()
        );
    }

    let partial = GenParams {
        partial_order: Some(0.5),
        ..GenParams::tiny()
    };
    println!(
        "\na tiny instance with partially ordered jobs:\n{}",
        to_facts(&generate(&partial, seed).unwrap())
    );
}
