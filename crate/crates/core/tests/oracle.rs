mod common;

use mpfjss::facts::parse_instance;
use mpfjss::oracle::{brute_force_optimal, OracleBudget, OracleError};
use mpfjss::validator::check_schedule;

#[test]
fn example_optimum_is_one() {
    let inst = common::example();
    let (t, witness) = brute_force_optimal(&inst, &OracleBudget::default()).unwrap();
    assert_eq!(t, 1);
    assert_eq!(witness.total_tardiness, 1);
    assert_eq!(check_schedule(&inst, &witness), vec![]);
}

#[test]
fn serial_chain_ending_at_deadline() {
    let inst = parse_instance(
        "op(a,2). op(b,3). needs(a,w). needs(b,w). res(w,1,a). res(w,1,b).
         job(j,5). recipe(j,a). recipe(j,b). prec(j,a,b).",
    )
    .unwrap();
    let (t, w) = brute_force_optimal(&inst, &OracleBudget::default()).unwrap();
    assert_eq!(t, 0);
    assert_eq!(w.start_of("j", "b"), Some(2));
}

#[test]
fn two_jobs_on_one_unit_resource() {
    let inst = parse_instance(
        "op(a,1). needs(a,w). res(w,1,a).
         job(j1,1). recipe(j1,a). job(j2,1). recipe(j2,a).",
    )
    .unwrap();
    assert_eq!(
        brute_force_optimal(&inst, &OracleBudget::default())
            .unwrap()
            .0,
        1
    );
}

#[test]
fn refuses_oversized_instances() {
    let inst = common::example();
    let budget = OracleBudget {
        max_tasks: 8,
        ..OracleBudget::default()
    };
    assert!(matches!(
        brute_force_optimal(&inst, &budget),
        Err(OracleError::OverBudget(_))
    ));
    let budget = OracleBudget {
        horizon: 5,
        ..OracleBudget::default()
    };
    assert!(matches!(
        brute_force_optimal(&inst, &budget),
        Err(OracleError::OverBudget(_))
    ));
    let budget = OracleBudget {
        node_limit: 10,
        ..OracleBudget::default()
    };
    assert_eq!(
        brute_force_optimal(&inst, &budget).unwrap_err(),
        OracleError::NodeLimit(10)
    );
}

#[test]
fn witnesses_of_tiny_instances_validate() {
    for seed in 0..40 {
        let inst = common::tiny(seed);
        let (t, w) = brute_force_optimal(&inst, &OracleBudget::default()).unwrap();
        assert_eq!(check_schedule(&inst, &w), vec![], "seed {seed}");
        assert_eq!(w.total_tardiness, t);
    }
}
