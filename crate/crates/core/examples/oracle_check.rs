//! Compares the optimizer with exhaustive enumeration on random tiny shops.
//!
//! cargo run --release --example oracle_check -- [count]

use std::time::Instant;

use mpfjss::bound::single_shot_bound;
use mpfjss::generate::{generate, GenParams};
use mpfjss::oracle::{brute_force_optimal, OracleBudget};
use mpfjss::scheduler::optimize;

fn main() {
    let count: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100);
    let mut agree = 0;
    let mut histogram = std::collections::BTreeMap::new();
    let t = Instant::now();
    for seed in 0..count {
        let inst = generate(&GenParams::tiny(), seed).unwrap();
        let (oracle, _) = brute_force_optimal(&inst, &OracleBudget::default()).unwrap();
        let solver = optimize(&inst, single_shot_bound(&inst), None).unwrap();
        let got = solver.schedule.map(|s| s.total_tardiness);
        if got == Some(oracle) {
            agree += 1;
        } else {
            println!("seed {seed}: oracle {oracle}, solver {got:?}");
        }
        *histogram.entry(oracle).or_insert(0) += 1;
    }
    println!("{agree}/{count} agree in {:.2}s", t.elapsed().as_secs_f64());
    println!("optimum histogram (T: instances): {histogram:?}");
}
