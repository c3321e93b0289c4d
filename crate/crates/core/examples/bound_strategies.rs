//! Probe sequences of the cap strategies, on a scripted oracle and on a
//! generated instance.
//!
//! cargo run --release --example bound_strategies

use std::time::Duration;

use mpfjss::bound::{
    exponential_bound, exponential_probes, incremental_bound, incremental_probes,
    single_shot_bound, Verdict,
};
use mpfjss::generate::{generate, GenParams};

fn show(log: &[(u64, Verdict)]) -> String {
    log.iter()
        .map(|(b, v)| format!("{b}:{v:?}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() {
    let oracle = |b: u64| if b >= 7 { Verdict::Sat } else { Verdict::Unsat };
    let exp = exponential_probes(1000, oracle);
    println!("scripted, exp:        {} -> {:?}", show(&exp.log), exp.cap);
    let inc = incremental_probes(5, 1000, oracle);
    println!("scripted, inc (w=5):  {} -> {:?}", show(&inc.log), inc.cap);

    let params = GenParams::default().with_jobs(10);
    let inst = generate(&params, 1).unwrap();
    let budget = Duration::from_secs(30);
    println!(
        "\ngenerated, 10 jobs, single-shot cap {}",
        single_shot_bound(&inst)
    );
    let r = exponential_bound(&inst, budget).unwrap();
    let log: Vec<_> = r.probes.iter().map(|p| (p.bound, p.verdict)).collect();
    println!(
        "exp: {} -> {:?} in {:.3}s",
        show(&log),
        r.cap,
        r.search_seconds
    );
    let r = incremental_bound(&inst, 20, budget).unwrap();
    let log: Vec<_> = r.probes.iter().map(|p| (p.bound, p.verdict)).collect();
    println!(
        "inc: {} -> {:?} in {:.3}s",
        show(&log),
        r.cap,
        r.search_seconds
    );
}
