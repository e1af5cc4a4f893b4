//! Expands the reachable state space of an instance, labels goals and
//! dead-ends, and computes goal distances.

use std::sync::Arc;

use genplan::domains::{blocks, gripper, visitall};
use genplan::statespace::{expand, ExpandLimits};
use genplan::strips::{ground, DomainModel, InstanceModel};

fn show(dom: DomainModel, inst: InstanceModel) {
    let gp = Arc::new(ground(&dom, &inst).expect("grounding"));
    let space = expand(gp, ExpandLimits::default()).expect("expansion");
    let goals = (0..space.num_states() as u32).filter(|&s| space.is_goal(s)).count();
    println!(
        "{:<16} states {:>6}  transitions {:>6}  from non-goals {:>6}  goals {:>4}  alive {:>6}  d_max {}",
        space.name(),
        space.num_states(),
        space.num_transitions(),
        space.num_nongoal_transitions(),
        goals,
        space.num_alive(),
        space.diameter()
    );
}

fn main() {
    show(blocks::domain(), blocks::clear_instance(&[blocks::block_names(5)], "b1"));
    show(gripper::domain(), gripper::instance(4));
    show(visitall::domain(), visitall::instance(3, 3, (1, 1)));

    let gp = Arc::new(ground(&gripper::domain(), &gripper::instance(2)).expect("grounding"));
    let space = expand(gp, ExpandLimits::default()).expect("expansion");
    let dump = space.write_dump();
    println!("\nfirst lines of the gripper-2 dump ({} lines):", dump.lines().count());
    for line in dump.lines().take(6) {
        println!("  {line}");
    }
}
