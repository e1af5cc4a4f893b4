//! Builds the Max-SAT theory for a training sample and writes it as WCNF
//! together with its clause tags.

use std::collections::BTreeMap;

use genplan::domains::gripper;
use genplan::pipeline::{prepare, RunConfig, Task};

fn main() {
    let task = Task { domain: gripper::domain(), train: vec![gripper::instance(4)], test: vec![] };
    let cfg = RunConfig::default();
    let prepared = prepare(&task, &cfg).expect("preparation");
    let pairs = prepared.initial_pairs(&cfg);
    let theory = prepared.theory(&pairs, &cfg);
    println!(
        "{} features, {} transition classes, {} initial class pairs",
        prepared.pool.len(),
        prepared.classes.len(),
        pairs.len()
    );
    println!("{} variables, {} clauses", theory.problem.num_vars(), theory.problem.num_clauses());
    let mut by_tag: BTreeMap<&str, usize> = BTreeMap::new();
    for t in &theory.tags {
        *by_tag.entry(t.name()).or_default() += 1;
    }
    for (tag, n) in by_tag {
        println!("  {tag:<16} {n}");
    }
    println!("  {:<16} {}", "soft", theory.problem.soft().len());

    let dir = std::env::temp_dir().join("genplan-encode-example");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join("gripper-4.wcnf");
    std::fs::write(&path, theory.problem.to_wcnf_string()).expect("write wcnf");
    std::fs::write(dir.join("gripper-4.wcnf.tags"), theory.sidecar()).expect("write tags");
    println!("written to {}", path.display());
}
