mod common;

use mpfjss::facts::{parse_instance, parse_json, to_facts, to_json, ParseError};
use mpfjss::generate::{generate, GenParams};
use mpfjss::instance::{tasks, validate_instance, InstanceViolation};
use proptest::prelude::*;

#[test]
fn example_has_nine_tasks_and_validates() {
    let inst = common::example();
    assert!(validate_instance(&inst).is_empty());
    assert_eq!(tasks(&inst).len(), 9);
    assert_eq!(inst.jobs.len(), 3);
    assert_eq!(inst.resources.len(), 7);
}

#[test]
fn example_round_trips_through_both_formats() {
    let inst = common::example();
    assert_eq!(parse_instance(&to_facts(&inst)).unwrap(), inst);
    assert_eq!(parse_json(&to_json(&inst)).unwrap(), inst);
}

#[test]
fn missing_machine_is_a_capability_gap() {
    let text = common::EXAMPLE.replace("res(m,4,o5).", "");
    let inst = parse_instance(&text).unwrap();
    let v = validate_instance(&inst);
    assert_eq!(
        v,
        vec![InstanceViolation::NoCapableInstance {
            op: "o5".into(),
            class: "m".into()
        }]
    );
    assert!(v[0].is_capability_gap());
}

#[test]
fn parse_errors_are_positioned() {
    match parse_instance("op(a,1).\nop(b 2).") {
        Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        parse_instance("job(j,3). recipe(j,a)."),
        Err(ParseError::Semantic { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_instances_round_trip(seed in any::<u64>(), partial in prop::option::of(0.0f64..1.0)) {
        let p = GenParams { jobs: (0, 8), partial_order: partial, ..GenParams::default() };
        let inst = generate(&p, seed).unwrap();
        prop_assert!(validate_instance(&inst).is_empty());
        prop_assert_eq!(&parse_instance(&to_facts(&inst)).unwrap(), &inst);
        prop_assert_eq!(&parse_json(&to_json(&inst)).unwrap(), &inst);
    }

    #[test]
    fn facts_survive_shuffled_lines(seed in any::<u64>()) {
        let inst = common::tiny(seed);
        let text = to_facts(&inst);
        let mut lines: Vec<&str> = text.lines().collect();
        lines.reverse();
        prop_assert_eq!(parse_instance(&lines.join("\n")).unwrap(), inst);
    }
}
