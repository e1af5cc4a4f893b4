//! Verifies hand-written policies for clearing a block on every state of a
//! 6-block instance and checks a termination certificate.

use std::sync::Arc;

use genplan::domains::blocks;
use genplan::policy::{check_complete, check_descending, verify_exhaustive, Policy};
use genplan::statespace::{expand, ExpandLimits};
use genplan::strips::{ground, Fact, State};

const THREE_RULES: &str = "genplan-policy 1
feature 0 3 bool Card(And(clear,{x}))
feature 1 1 bool Card(holding)
feature 2 4 num Card(Exists(on_plus,{x}))
{!f0, f1, f2=0} -> {f0, !f1}
{!f0, !f1, f2>0} -> {f0?, f1, f2--}
{!f0, f1, f2>0} -> {!f1}
";

// Same features, but a held block may also be stacked back above x.
const LOOSE: &str = "genplan-policy 1
feature 0 3 bool Card(And(clear,{x}))
feature 1 1 bool Card(holding)
feature 2 4 num Card(Exists(on_plus,{x}))
{!f0, f1, f2=0} -> {f0, !f1}
{!f0, !f1, f2>0} -> {f0?, f1, f2--}
{!f0, f1, f2>0} -> {!f1} | {!f1, f2++}
";

fn main() {
    let inst = blocks::clear_instance(&[blocks::block_names(6)], "b1");
    let gp = Arc::new(ground(&blocks::domain(), &inst).expect("grounding"));
    let space = expand(gp.clone(), ExpandLimits::default()).expect("expansion");
    println!("{}: {} states, {} alive", space.name(), space.num_states(), space.num_alive());

    for (name, text) in [("three rules", THREE_RULES), ("loose", LOOSE)] {
        let policy = Policy::parse(text).expect("policy parses");
        let report = verify_exhaustive(&space, &policy);
        println!(
            "{name}: {:?}, {} compatible transitions, complete {}",
            report.verdict(),
            report.compatible_transitions,
            check_complete(&space, &policy).is_ok()
        );
        if let Some(cycle) = &report.cycle {
            println!("  cycle through {} states", cycle.len());
        }
    }

    // ⟨blocks above x, holding⟩ computed straight from the atoms.
    let holding: Vec<u32> = (0..gp.atoms.len() as u32).filter(|&a| gp.atom_fact(a).predicate == "holding").collect();
    let on: Vec<(u32, String, String)> = (0..gp.atoms.len() as u32)
        .map(|a| (a, gp.atom_fact(a)))
        .filter(|(_, f)| f.predicate == "on")
        .map(|(a, f): (u32, Fact)| (a, f.args[0].clone(), f.args[1].clone()))
        .collect();
    let tuple = |s: &State| {
        let mut above = vec!["b1".to_string()];
        let mut changed = true;
        while changed {
            changed = false;
            for (a, x, y) in &on {
                if s.contains(*a) && above.contains(y) && !above.contains(x) {
                    above.push(x.clone());
                    changed = true;
                }
            }
        }
        vec![above.len() as u32 - 1, holding.iter().any(|&a| s.contains(a)) as u32]
    };
    let policy = Policy::parse(THREE_RULES).unwrap();
    println!("three-rule policy descends over <n, H>: {:?}", check_descending(&space, &policy, &tuple));
}
