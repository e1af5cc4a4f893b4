//! Writes the built-in domains and a set of instances as PDDL files.
//!
//! ```text
//! cargo run --example export_benchmarks -- benchmarks
//! ```

use std::fs;
use std::path::Path;

use genplan::domains::{blocks, gripper, miconic, spanner, visitall};
use genplan::strips::instance_to_pddl;
use genplan::strips::InstanceModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn write_set(root: &Path, name: &str, domain: &str, instances: &[(String, InstanceModel)]) {
    let dir = root.join(name);
    fs::create_dir_all(&dir).expect("create benchmark directory");
    fs::write(dir.join("domain.pddl"), domain).expect("write domain");
    for (file, inst) in instances {
        fs::write(dir.join(format!("{file}.pddl")), instance_to_pddl(inst)).expect("write instance");
    }
    println!("{}: {} instances", dir.display(), instances.len());
}

fn main() {
    let root = std::env::args().nth(1).unwrap_or_else(|| "benchmarks".into());
    let root = Path::new(&root);
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let mut grip = vec![("train-4".to_string(), gripper::instance(4))];
    grip.extend([10, 20, 30].map(|n| (format!("test-{n}"), gripper::instance(n))));
    write_set(root, "gripper", gripper::PDDL, &grip);

    let mut clear = vec![("clear-5".to_string(), blocks::clear_instance(&[blocks::block_names(5)], "b1"))];
    let mut six = blocks::clear_instance(&[blocks::block_names(6)], "b1");
    six.name = "clear-6".into();
    clear.push(("clear-6".into(), six));
    for n in [8, 12, 15] {
        clear.push((format!("clear-test-{n}"), blocks::random_clear_instance(&mut rng, n)));
    }
    write_set(root, "blocks", blocks::PDDL, &clear);

    let mut visit = vec![("train-3x3".to_string(), visitall::instance(3, 3, (1, 1)))];
    for i in 0..3 {
        visit.push((format!("test-4x4-{i}"), visitall::random_instance(&mut rng, 4, 4)));
    }
    visit.push(("test-8x8".into(), visitall::instance(8, 8, (0, 0))));
    write_set(root, "visitall", visitall::PDDL, &visit);

    let span = vec![
        ("train-4-2".to_string(), spanner::instance(4, &[1, 2], 2)),
        ("test-10-5".to_string(), spanner::random_instance(&mut rng, 10, 5, 4)),
    ];
    write_set(root, "spanner", spanner::PDDL, &span);

    let floors = rng.gen_range(4..=6);
    let mic = vec![
        ("train-3".to_string(), miconic::instance(3, &[(0, 2), (2, 1)], 0)),
        (format!("test-{floors}"), miconic::random_instance(&mut rng, floors, 4)),
    ];
    write_set(root, "miconic", miconic::PDDL, &mic);
}
