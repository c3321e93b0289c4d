mod common;

use std::collections::BTreeSet;

use common::{assignment_mut, example, example_schedule};
use mpfjss::instance::{Demand, Instance, JobSpec, OperationSpec, ResourceInstance};
use mpfjss::schedule::{Assignment, Schedule};
use mpfjss::validator::{check_schedule, total_tardiness, ViolationKind};

fn kinds(inst: &Instance, s: &Schedule) -> BTreeSet<ViolationKind> {
    check_schedule(inst, s)
        .into_iter()
        .map(|v| v.kind)
        .collect()
}

#[test]
fn hand_schedule_is_clean() {
    let inst = example();
    let s = example_schedule();
    assert_eq!(check_schedule(&inst, &s), vec![]);
    assert_eq!(total_tardiness(&inst, &s), 1);
    let c = s.completions();
    assert_eq!((c["j1"], c["j2"], c["j3"]), (3, 2, 4));
}

#[test]
fn dropped_machine_is_demand_unmet() {
    let inst = example();
    let mut s = example_schedule();
    assignment_mut(&mut s, "j2", "o4")
        .resources
        .retain(|r| r.0 != "m");
    let v = check_schedule(&inst, &s);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].kind, ViolationKind::DemandUnmet);
}

#[test]
fn incapable_instance_is_demand_unmet() {
    let inst = example();
    let mut s = example_schedule();
    // m1 cannot run o4.
    assignment_mut(&mut s, "j2", "o4").resources = vec![("m".into(), 1), ("w".into(), 2)];
    assert!(kinds(&inst, &s).contains(&ViolationKind::DemandUnmet));
}

#[test]
fn stretched_end_is_preemption() {
    let inst = example();
    let mut s = example_schedule();
    assignment_mut(&mut s, "j2", "o3").end = 3;
    assert_eq!(
        kinds(&inst, &s),
        [ViolationKind::PreemptionOrNegativeTime].into()
    );
}

#[test]
fn negative_start_is_flagged() {
    let inst = example();
    let mut s = example_schedule();
    let a = assignment_mut(&mut s, "j2", "o4");
    a.start = -1;
    a.end = 0;
    assert!(kinds(&inst, &s).contains(&ViolationKind::PreemptionOrNegativeTime));
}

#[test]
fn same_job_overlap() {
    let inst = example();
    let mut s = example_schedule();
    let a = assignment_mut(&mut s, "j3", "o5");
    a.start = 3;
    a.end = 4;
    // Completion is unchanged, so only the overlap with j3's o2 remains.
    assert_eq!(kinds(&inst, &s), [ViolationKind::SameJobOverlap].into());
}

#[test]
fn shared_worker_overlap() {
    let inst = example();
    let mut s = example_schedule();
    assignment_mut(&mut s, "j2", "o4").resources = vec![("m".into(), 3), ("w".into(), 3)];
    let v = check_schedule(&inst, &s);
    assert_eq!(v.len(), 1, "{v:?}");
    assert_eq!(v[0].kind, ViolationKind::ResourceOverlap);
    assert!(v[0].entities.contains(&"(w,3)".to_string()));
}

#[test]
fn reversed_precedence() {
    let inst = example();
    let mut s = example_schedule();
    // Swap j3's o3 and o2: o2 now runs before o3 and before o1 completes.
    let o2 = assignment_mut(&mut s, "j3", "o2");
    o2.start = 0;
    o2.end = 1;
    let o3 = assignment_mut(&mut s, "j3", "o3");
    o3.start = 3;
    o3.end = 4;
    assert_eq!(kinds(&inst, &s), [ViolationKind::PrecedenceOrder].into());
}

#[test]
fn misreported_tardiness() {
    let inst = example();
    let mut s = example_schedule();
    s.total_tardiness = 0;
    assert_eq!(
        kinds(&inst, &s),
        [ViolationKind::TardinessMiscomputed].into()
    );
    let mut s = example_schedule();
    s.tardiness.insert("j1".into(), 2);
    assert_eq!(
        kinds(&inst, &s),
        [ViolationKind::TardinessMiscomputed].into()
    );
}

#[test]
fn alien_entities() {
    let inst = example();
    let mut s = example_schedule();
    s.assignments.push(Assignment {
        job: "j9".into(),
        op: "o1".into(),
        start: 10,
        end: 11,
        resources: vec![("w".into(), 1)],
    });
    assert!(kinds(&inst, &s).contains(&ViolationKind::Alien));
    let mut s = example_schedule();
    s.assignments.retain(|a| !(a.job == "j1" && a.op == "o2"));
    assert!(kinds(&inst, &s).contains(&ViolationKind::Alien));
    let mut s = example_schedule();
    assignment_mut(&mut s, "j1", "o1").resources = vec![("w".into(), 7)];
    assert!(kinds(&inst, &s).contains(&ViolationKind::Alien));
}

fn one_resource_pair() -> Instance {
    Instance {
        operations: vec![
            OperationSpec {
                id: "a".into(),
                duration: 2,
            },
            OperationSpec {
                id: "b".into(),
                duration: 3,
            },
        ],
        resources: vec![ResourceInstance {
            class: "w".into(),
            index: 1,
            capabilities: ["a".to_string(), "b".to_string()].into(),
        }],
        demands: vec![
            Demand {
                op: "a".into(),
                classes: ["w".to_string()].into(),
            },
            Demand {
                op: "b".into(),
                classes: ["w".to_string()].into(),
            },
        ],
        jobs: vec![JobSpec {
            id: "j".into(),
            ops: ["a".to_string(), "b".to_string()].into(),
            precedence: [("a".to_string(), "b".to_string())].into(),
            deadline: 0,
        }],
    }
}

fn at(op: &str, start: i64, dur: i64) -> Assignment {
    Assignment {
        job: "j".into(),
        op: op.into(),
        start,
        end: start + dur,
        resources: vec![("w".into(), 1)],
    }
}

#[test]
fn back_to_back_is_legal_and_tardiness_counts_minutes() {
    let mut inst = one_resource_pair();
    inst.jobs[0].deadline = 0;
    let mut s = Schedule {
        assignments: vec![at("a", 0, 2), at("b", 2, 3)],
        tardiness: [("j".to_string(), 5)].into(),
        total_tardiness: 5,
        proven_optimal: false,
    };
    assert_eq!(check_schedule(&inst, &s), vec![]);
    assert_eq!(total_tardiness(&inst, &s), 5);
    inst.jobs[0].deadline = 5;
    assert_eq!(total_tardiness(&inst, &s), 0);
    // One job swapped against its own order: exactly one violation.
    s.assignments = vec![at("b", 0, 3), at("a", 3, 2)];
    inst.jobs[0].deadline = 0;
    let v = check_schedule(&inst, &s);
    assert_eq!(v.len(), 1, "{v:?}");
    assert_eq!(v[0].kind, ViolationKind::PrecedenceOrder);
}

#[test]
fn violations_serialize_with_kebab_kinds() {
    let inst = example();
    let mut s = example_schedule();
    s.total_tardiness = 7;
    let json = serde_json::to_string(&check_schedule(&inst, &s)).unwrap();
    assert!(json.contains("\"tardiness-miscomputed\""), "{json}");
}
