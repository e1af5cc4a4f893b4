//! Learns a policy for clearing a block `x` from one 5-block tower and tests
//! it on random instances with 3 to 15 blocks.
//!
//! Pass `--distances` to admit distance features; the optimum then uses a
//! cheaper distance feature instead of counting the blocks above `x`.

use genplan::domains::blocks;
use genplan::pipeline::{learn, RunConfig, Task};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let distances = std::env::args().any(|a| a == "--distances");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let task = Task {
        domain: blocks::domain(),
        train: vec![blocks::clear_instance(&[blocks::block_names(5)], "b1")],
        test: (0..30)
            .map(|_| {
                let n = rng.gen_range(3..=15);
                blocks::random_clear_instance(&mut rng, n)
            })
            .collect(),
    };
    let cfg = RunConfig { distances, ..Default::default() };
    let out = learn(&task, &cfg).expect("learning");
    print!("{}", out.report.table());
    if let Some(p) = &out.policy {
        print!("\n{p}");
    }
}
