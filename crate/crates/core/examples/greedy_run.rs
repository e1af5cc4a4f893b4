//! Learns a Gripper policy and executes it greedily on a large instance,
//! printing the plan.

use genplan::domains::gripper;
use genplan::pipeline::{ground_instance, learn, RunConfig, Task};
use genplan::policy::{greedy_execute, Execution, TieBreak};

fn main() {
    let task = Task { domain: gripper::domain(), train: vec![gripper::instance(4)], test: vec![] };
    let cfg = RunConfig::default();
    let policy = learn(&task, &cfg).expect("learning").policy.expect("a policy exists");
    println!("{policy}");

    let big = gripper::instance_with(12, &[3, 7], false);
    let gp = ground_instance(&task.domain, &big, cfg.grounding_limits).expect("grounding");
    for tie in [TieBreak::First, TieBreak::Random(42)] {
        match greedy_execute(&gp, &policy, None, tie) {
            Execution::Reached(plan) => {
                println!("{tie:?}: goal in {} steps", plan.len());
                for a in plan.iter().take(8) {
                    println!("  {}", gp.action_name(*a));
                }
                println!("  ...");
            }
            Execution::Failed { reason, steps } => println!("{tie:?}: failed after {steps} steps ({reason})"),
        }
    }
}
