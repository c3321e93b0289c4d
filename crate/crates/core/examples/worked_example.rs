//! Solves the bundled five-operation shop with every strategy.
//!
//! cargo run --example worked_example

use mpfjss::bound::{solve_with_strategy, Strategy, StrategyConfig};
use mpfjss::parse_instance;

fn main() {
    let inst =
        parse_instance(include_str!("../data/fa_example.lp")).expect("bundled instance parses");
    for cfg in [
        StrategyConfig::new(Strategy::Single),
        StrategyConfig::new(Strategy::Inc).window(2),
        StrategyConfig::new(Strategy::Exp),
    ] {
        let r = solve_with_strategy(&inst, &cfg).expect("instance is solvable");
        let probes: Vec<String> = r
            .probes
            .iter()
            .map(|p| format!("{}:{:?}", p.bound, p.verdict))
            .collect();
        println!(
            "{:<6} cap {:>2}  probes [{}]  T = {}  ({})",
            cfg.strategy,
            r.cap.unwrap(),
            probes.join(" "),
            r.total_tardiness.unwrap(),
            r.status
        );
    }

    let best = solve_with_strategy(&inst, &StrategyConfig::default())
        .unwrap()
        .schedule
        .unwrap();
    println!("\njob op  start end  resources");
    for a in &best.assignments {
        let res: Vec<String> = a.resources.iter().map(|(c, i)| format!("{c}{i}")).collect();
        println!(
            "{:<3} {:<3} {:>5} {:>3}  {}",
            a.job,
            a.op,
            a.start,
            a.end,
            res.join(" ")
        );
    }
    for (job, t) in &best.tardiness {
        println!("tardiness {job} = {t}");
    }
}
