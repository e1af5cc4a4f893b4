//! Learns a Visitall policy on a 3x3 grid and verifies it exhaustively on
//! unseen 4x4 grids.

use genplan::domains::visitall;
use genplan::pipeline::{ground_instance, learn, RunConfig, Task};
use genplan::policy::verify_exhaustive;
use genplan::statespace::{expand, ExpandLimits};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let task = Task { domain: visitall::domain(), train: vec![visitall::instance(3, 3, (1, 1))], test: vec![] };
    let cfg = RunConfig::default();
    let out = learn(&task, &cfg).expect("learning");
    print!("{}", out.report.table());
    let Some(policy) = &out.policy else { return };
    print!("\n{policy}\n");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let inst = visitall::random_instance(&mut rng, 4, 4);
        let gp = ground_instance(&task.domain, &inst, cfg.grounding_limits).expect("grounding");
        let space = expand(gp, ExpandLimits::default()).expect("expansion");
        let report = verify_exhaustive(&space, policy);
        println!("{}: {} states, {:?}", inst.name, space.num_states(), report.verdict());
    }
}
