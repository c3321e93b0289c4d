//! Difference constraints with backtracking.
//!
//! cargo run --example dl_engine

use mpfjss::dl::{Assertion, DlEngine};

fn main() {
    let mut dl = DlEngine::new();
    let z = dl.zero();
    let a = dl.new_var("a");
    let b = dl.new_var("b");
    let c = dl.new_var("c");

    dl.assert_lower(a, z, 0);
    dl.assert_lower(b, a, 3); // b starts 3 after a
    dl.assert_lower(c, b, 2);
    println!("least solution (a, b, c) = {:?}", dl.solution().unwrap());

    dl.push();
    dl.assert_upper(c, z, 8);
    dl.assert_lower(a, z, 2);
    println!("with c <= 8 and a >= 2: {:?}", dl.solution().unwrap());
    match dl.assert_lower(b, z, 7) {
        Assertion::Feasible => println!("b >= 7 accepted"),
        Assertion::Infeasible(cycle) => {
            println!("b >= 7 rejected; negative cycle:");
            for k in cycle {
                println!("  {} - {} <= {}", dl.name(k.x), dl.name(k.y), k.k);
            }
        }
    }
    dl.pop().unwrap();
    println!(
        "after pop: feasible = {}, {:?}",
        dl.is_feasible(),
        dl.solution().unwrap()
    );
}
