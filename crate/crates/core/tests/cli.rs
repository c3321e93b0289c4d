mod common;

use std::path::Path;
use std::process::{Command, Output};

use mpfjss::facts::to_facts;
use mpfjss::generate::{generate, GenParams};

fn mpfjss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpfjss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn example_file(dir: &Path) -> String {
    let p = dir.join("example.lp");
    std::fs::write(&p, common::EXAMPLE).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn solve_exp() {
    let dir = tempfile::tempdir().unwrap();
    let inst = example_file(dir.path());
    let out = mpfjss(&["solve", &inst, "--strategy", "exp"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["total_tardiness"], 1);
    assert_eq!(r["cap"], 1);
    assert_eq!(r["status"], "optimal");
}

#[test]
fn solve_inc_window_two() {
    let dir = tempfile::tempdir().unwrap();
    let inst = example_file(dir.path());
    let out = mpfjss(&["solve", &inst, "--strategy", "inc", "--window", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["cap"], 2);
}

#[test]
fn solve_csv_row() {
    let dir = tempfile::tempdir().unwrap();
    let inst = example_file(dir.path());
    let out = mpfjss(&["solve", &inst, "--format", "csv", "--strategy", "single"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "instance,jobs,strategy,verdict,search_s,opt_s,total_tardiness,cap"
    );
    assert!(
        lines[1].starts_with("example.lp,3,single,optimal,"),
        "{}",
        lines[1]
    );
    assert!(lines[1].ends_with(",1,9"));
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(mpfjss(&["solve", "missing.lp"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.lp");
    std::fs::write(&bad, "op(a 1).").unwrap();
    assert_eq!(
        mpfjss(&["solve", bad.to_str().unwrap()]).status.code(),
        Some(3)
    );
    let gap = dir.path().join("gap.lp");
    std::fs::write(&gap, common::EXAMPLE.replace("res(m,4,o5).", "")).unwrap();
    assert_eq!(
        mpfjss(&["solve", gap.to_str().unwrap()]).status.code(),
        Some(4)
    );
    assert_eq!(
        mpfjss(&["solve", "x.lp", "--window", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(mpfjss(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn validate_solver_output_and_a_mutation() {
    let dir = tempfile::tempdir().unwrap();
    let inst = example_file(dir.path());
    let report = dir.path().join("report.json");
    let out = mpfjss(&["solve", &inst, "--output", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = mpfjss(&["validate", &inst, report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out), serde_json::json!([]));

    let mut sched = common::example_schedule();
    sched.total_tardiness = 3;
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, sched.to_json()).unwrap();
    let out = mpfjss(&["validate", &inst, bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)[0]["kind"], "tardiness-miscomputed");
}

#[test]
fn generate_days_with_split() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = mpfjss(&[
        "generate", "--seed", "42", "--days", "10", "--split", "5", "--output", out_dir,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let days = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .is_some_and(|x| x == "lp")
        })
        .count();
    assert_eq!(days, 10);
    let subs = std::fs::read_dir(dir.path().join("split")).unwrap().count();
    assert!(subs >= 10 * 6, "{subs} sub-instances");
    let day1 = mpfjss::load_instance(&dir.path().join("day01.lp")).unwrap();
    assert!((30..=50).contains(&day1.jobs.len()));
    assert_eq!(day1, generate(&GenParams::default(), 42).unwrap());
}

#[test]
fn bench_empty_directory_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = mpfjss(&["bench", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "instance,jobs,strategy,verdict,search_s,opt_s,total_tardiness,cap\n"
    );
}

#[test]
fn bench_rows_are_sorted_and_failures_recorded() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..3u64 {
        let inst = common::tiny(seed);
        std::fs::write(dir.path().join(format!("t{seed}.lp")), to_facts(&inst)).unwrap();
    }
    std::fs::write(dir.path().join("broken.lp"), "op(").unwrap();
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let csv_path = dir.path().join("out.csv");
    let out = mpfjss(&[
        "bench",
        dir.path().to_str().unwrap(),
        "--jobs",
        "2",
        "--timeout",
        "10",
        "--output",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4 * 3);
    assert!(rows
        .iter()
        .take(3)
        .all(|r| &r[0] == "broken.lp" && &r[3] == "error"));
    let keys: Vec<(usize, String)> = rows
        .iter()
        .map(|r| (r[1].parse().unwrap(), r[0].to_string()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(rows.iter().skip(3).all(|r| &r[3] == "optimal"));
}

#[test]
fn tight_budget_on_a_large_instance_is_not_optimal() {
    let dir = tempfile::tempdir().unwrap();
    let day = generate(&GenParams::default().with_jobs(40), 5).unwrap();
    std::fs::write(dir.path().join("day.lp"), to_facts(&day)).unwrap();
    let out = mpfjss(&[
        "bench",
        dir.path().to_str().unwrap(),
        "--strategies",
        "exp",
        "--timeout",
        "1",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    let verdict = row.split(',').nth(3).unwrap();
    assert!(
        ["timeout", "incumbent", "bound-not-found"].contains(&verdict),
        "{row}"
    );
}
