//! Generates the feature pool for a few training instances and prints its
//! size and cheapest features.

use std::sync::Arc;
use std::time::Instant;

use genplan::domains::{blocks, gripper, visitall};
use genplan::features::{generate_pool, PoolConfig, Vocabulary, VocabularyOptions};
use genplan::statespace::{expand, ExpandLimits, SampleSet};
use genplan::strips::{ground, DomainModel, InstanceModel};

fn show(label: &str, dom: DomainModel, inst: InstanceModel) {
    let start = Instant::now();
    let gp = Arc::new(ground(&dom, &inst).expect("grounding"));
    let space = expand(gp, ExpandLimits::default()).expect("expansion");
    let sample = SampleSet::new(vec![space]);
    let vocab = Vocabulary::new(sample.spaces.iter().map(|s| &*s.problem), VocabularyOptions::default()).unwrap();
    let (pool, _) = generate_pool(&sample, &vocab, PoolConfig::with_complexity(8)).unwrap();
    println!("{label}: {} features from {} states in {:.2?}", pool.len(), sample.num_states(), start.elapsed());
    println!("  {:?}", pool.stats);
    for line in pool.dump().lines().take(12) {
        println!("  {line}");
    }
}

fn main() {
    let towers = vec![blocks::block_names(5)];
    show("clear", blocks::domain(), blocks::clear_instance(&towers, "b1"));
    show("gripper", gripper::domain(), gripper::instance(4));
    show("visitall", visitall::domain(), visitall::instance(3, 3, (1, 1)));
}
