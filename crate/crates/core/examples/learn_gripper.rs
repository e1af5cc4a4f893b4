//! Learns a general policy for Gripper from a single 4-ball instance and
//! tests it on random instances with up to 30 balls.

use genplan::domains::gripper;
use genplan::pipeline::{learn, RunConfig, Task};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let task = Task {
        domain: gripper::domain(),
        train: vec![gripper::instance(4)],
        test: (0..30).map(|_| gripper::random_instance(&mut rng, 30)).collect(),
    };
    let out = learn(&task, &RunConfig::default()).expect("learning");
    print!("{}", out.report.table());
    match &out.policy {
        Some(p) => print!("\n{p}"),
        None => println!("{}", out.report.unsat_reason.unwrap_or_default()),
    }
}
