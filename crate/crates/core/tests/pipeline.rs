use std::path::{Path, PathBuf};

use genplan::domains::{blocks, gripper};
use genplan::pipeline::{learn, prepare, solve_loop, PipelineError, RunConfig, Task};
use genplan::policy::{verify_exhaustive, Execution};

const ROOT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../benchmarks");

fn files(domain: &str, train: &[&str], test: &[&str]) -> Task {
    let dir = Path::new(ROOT).join(domain);
    let paths = |names: &[&str]| names.iter().map(|n| dir.join(n)).collect::<Vec<PathBuf>>();
    Task::load(&dir.join("domain.pddl"), &paths(train), &paths(test), &[]).unwrap()
}

fn no_distances() -> RunConfig {
    RunConfig { distances: false, ..RunConfig::default() }
}

#[test]
fn gripper_from_files() {
    let task = files("gripper", &["train-4.pddl"], &["test-10.pddl", "test-20.pddl"]);
    let out = learn(&task, &RunConfig::default()).unwrap();
    assert_eq!(out.exit_code(), 0);
    let r = &out.report;
    assert_eq!(r.transitions, 1140);
    assert_eq!((r.cost, r.features.len(), r.max_weight), (Some(9), 3, Some(4)));
    assert_eq!(r.verified, Some(1));
    assert_eq!(out.tests.len(), 2);
    assert!(out.tests.iter().all(|t| t.execution.reached()));
}

#[test]
fn clear_from_files() {
    let task = files("blocks", &["clear-5.pddl"], &["clear-test-8.pddl"]);
    let out = learn(&task, &no_distances()).unwrap();
    assert_eq!(out.exit_code(), 0);
    let r = &out.report;
    assert_eq!((r.transitions, r.classes), (1161, 55));
    assert_eq!((r.cost, r.features.len(), r.max_weight), (Some(8), 3, Some(4)));
    assert!(matches!(out.tests[0].execution, Execution::Reached(_)));
}

#[test]
fn visitall_learns_one_rule() {
    let task = files("visitall", &["train-3x3.pddl"], &["test-4x4-0.pddl"]);
    let out = learn(&task, &RunConfig::default()).unwrap();
    assert_eq!(out.exit_code(), 0);
    assert_eq!(out.report.transitions, 2396);
    assert_eq!(out.report.cost, Some(7));
    assert_eq!(out.report.rules, Some(1));
    assert!(out.tests[0].execution.reached());
}

#[test]
fn complexity_one_has_no_gripper_policy() {
    let task = Task { domain: gripper::domain(), train: vec![gripper::instance(4)], test: vec![gripper::instance(5)] };
    let out = learn(&task, &RunConfig { max_complexity: 1, ..RunConfig::default() }).unwrap();
    assert_eq!(out.exit_code(), 1);
    assert!(out.policy.is_none() && out.tests.is_empty());
    assert!(out.report.unsat_reason.is_some());
    assert!(out.report.key_values().contains("result unsat"));
}

#[test]
fn runs_are_deterministic() {
    let task = Task {
        domain: blocks::domain(),
        train: vec![blocks::clear_instance(&[blocks::block_names(4)], "b2")],
        test: vec![blocks::clear_instance(&[blocks::block_names(7)], "b1")],
    };
    let cfg = RunConfig { seed: 3, ..no_distances() };
    let a = learn(&task, &cfg).unwrap();
    let b = learn(&task, &cfg).unwrap();
    assert_eq!(a.report.key_values(), b.report.key_values());
    assert_eq!(a.policy, b.policy);
    assert_eq!(a.theory.problem.to_wcnf_string(), b.theory.problem.to_wcnf_string());
}

#[test]
fn seeds_and_modes_agree_on_the_cost() {
    let task = Task { domain: gripper::domain(), train: vec![gripper::instance(3)], test: Vec::new() };
    let base = RunConfig { max_complexity: 6, ..RunConfig::default() };
    let p = prepare(&task, &base).unwrap();
    let mut costs = Vec::new();
    for cfg in [
        RunConfig { seed: 1, ..base.clone() },
        RunConfig { seed: 2, extra_pairs: Some(0), ..base.clone() },
        RunConfig { incremental: false, ..base.clone() },
    ] {
        let lp = solve_loop(&p, &cfg).unwrap();
        costs.push(lp.solution.unwrap().cost);
    }
    assert!(costs.iter().all(|&c| c == costs[0]), "{costs:?}");

    // without random pairs the lazy loop enforces a subset of all pairs
    let lazy = solve_loop(&p, &RunConfig { extra_pairs: Some(0), ..base.clone() }).unwrap();
    let eager = solve_loop(&p, &RunConfig { incremental: false, ..base }).unwrap();
    assert_eq!(eager.iterations, 1);
    assert!(lazy.theory.pairs.len() <= eager.theory.pairs.len());
}

#[test]
fn learned_policies_verify_on_every_training_space() {
    let task = Task {
        domain: gripper::domain(),
        train: vec![gripper::instance(2), gripper::instance_with(3, &[2], true)],
        test: Vec::new(),
    };
    let out = learn(&task, &RunConfig::default()).unwrap();
    let policy = out.policy.as_ref().unwrap();
    assert_eq!(out.verification.len(), 2);
    for space in &out.prepared.sample.spaces {
        assert!(verify_exhaustive(space, policy).solves());
    }
}

#[test]
fn configuration_errors() {
    let task = Task { domain: gripper::domain(), train: vec![gripper::instance(2)], test: Vec::new() };
    for cfg in [RunConfig { slack: 0, ..RunConfig::default() }, RunConfig { max_complexity: 0, ..RunConfig::default() }]
    {
        assert!(matches!(learn(&task, &cfg), Err(PipelineError::Config(_))));
    }
    let empty = Task { train: Vec::new(), ..task };
    assert!(matches!(learn(&empty, &RunConfig::default()), Err(PipelineError::Config(_))));

    let missing = Task::load(Path::new("/nonexistent/domain.pddl"), &[], &[], &[]);
    assert!(matches!(missing, Err(PipelineError::Io { .. })));
}

#[test]
fn goal_parameters_come_from_the_caller() {
    let dir = Path::new(ROOT).join("blocks");
    let params = [("y".to_string(), "b2".to_string())];
    let task = Task::load(&dir.join("domain.pddl"), &[dir.join("clear-5.pddl")], &[], &params).unwrap();
    assert_eq!(task.train[0].goal_parameters.len(), 2);
}
