use std::sync::Arc;

use genplan::domains::{blocks, gripper, miconic, spanner, visitall};
use genplan::statespace::{expand, ExpandLimits, SampleSet, StateSpace, StateSpaceError};
use genplan::strips::{ground, parse_domain, parse_instance, GroundProblem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn space(dom: genplan::strips::DomainModel, inst: genplan::strips::InstanceModel) -> StateSpace {
    expand(Arc::new(ground(&dom, &inst).unwrap()), ExpandLimits::default()).unwrap()
}

#[test]
fn gripper_four_balls() {
    let ss = space(gripper::domain(), gripper::instance(4));
    assert_eq!(ss.num_states(), 256);
    assert_eq!(ss.num_nongoal_transitions(), 1140);
}

#[test]
fn clear_five_blocks() {
    let towers = vec![blocks::block_names(5)];
    let ss = space(blocks::domain(), blocks::clear_instance(&towers, "b1"));
    assert_eq!(ss.num_states(), 866);
    assert_eq!(ss.num_nongoal_transitions(), 1161);
}

#[test]
fn visitall_three_by_three() {
    let ss = space(visitall::domain(), visitall::instance(3, 3, (1, 1)));
    assert_eq!(ss.num_states(), 849);
    assert_eq!(ss.num_nongoal_transitions(), 2396);
}

// Independent distance oracle: Bellman-style relaxation to a fixpoint.
#[test]
fn vstar_matches_relaxation() {
    let ss = space(visitall::domain(), visitall::instance(2, 3, (0, 0)));
    let n = ss.num_states();
    let mut d: Vec<Option<u32>> = (0..n as u32).map(|s| ss.is_goal(s).then_some(0)).collect();
    loop {
        let mut changed = false;
        for t in &ss.transitions {
            if let Some(x) = d[t.dst as usize] {
                if d[t.src as usize].is_none_or(|y| x + 1 < y) {
                    d[t.src as usize] = Some(x + 1);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    assert_eq!(d, ss.vstar);
}

#[test]
fn sample_set_offsets() {
    let a = space(gripper::domain(), gripper::instance(1));
    let b = space(gripper::domain(), gripper::instance(2));
    let (na, ta) = (a.num_states(), a.num_transitions());
    let set = SampleSet::new(vec![a, b]);
    assert_eq!(set.locate_state(na), (1, 0));
    assert_eq!(set.locate_state(na - 1), (0, na as u32 - 1));
    assert_eq!(set.global_state(1, 3), na + 3);
    assert_eq!(set.transition(ta).0, 1);
    assert_eq!(set.transition(ta).1, set.spaces[1].transitions[0]);
}

#[test]
fn dump_rejects_tampering() {
    let gp = Arc::new(ground(&gripper::domain(), &gripper::instance(1)).unwrap());
    let ss = expand(gp.clone(), ExpandLimits::default()).unwrap();
    let text = ss.write_dump();
    let bad = text.replacen("t 0 ", "t 1 ", 1);
    assert!(StateSpace::read_dump(&bad, gp).is_err());
}

fn two_blocks() -> Arc<GroundProblem> {
    let towers = vec![vec!["b1".to_string(), "b2".to_string()]];
    Arc::new(ground(&blocks::domain(), &blocks::clear_instance(&towers, "b1")).unwrap())
}

#[test]
fn two_block_space() {
    let ss = expand(two_blocks(), ExpandLimits::default()).unwrap();
    // b2 on b1, holding b2, both on table, holding b1, b1 on b2
    assert_eq!(ss.num_states(), 5);
    assert_eq!(ss.initial(), 0);
    assert_eq!(ss.vstar[0], Some(1));
    assert_eq!(ss.diameter(), 1);
    assert!((0..5).all(|s| !ss.is_deadend(s)));
}

#[test]
fn dump_round_trip() {
    let gp = two_blocks();
    let ss = expand(gp.clone(), ExpandLimits::default()).unwrap();
    let text = ss.write_dump();
    let back = StateSpace::read_dump(&text, gp).unwrap();
    assert_eq!(back.states, ss.states);
    assert_eq!(back.transitions, ss.transitions);
    assert_eq!(back.vstar, ss.vstar);
    assert_eq!(back.write_dump(), text);
}

#[test]
fn dump_with_other_version_is_rejected() {
    let gp = two_blocks();
    let text = expand(gp.clone(), ExpandLimits::default()).unwrap().write_dump();
    let bad = text.replacen("genplan-statespace 1", "genplan-statespace 2", 1);
    assert!(matches!(StateSpace::read_dump(&bad, gp), Err(StateSpaceError::Format { .. })));
}

#[test]
fn state_limit_is_enforced() {
    let limits = ExpandLimits { max_states: 3, max_transitions: 100 };
    assert!(matches!(expand(two_blocks(), limits), Err(StateSpaceError::Limit { what: "states", .. })));
    let limits = ExpandLimits { max_states: 100, max_transitions: 2 };
    assert!(matches!(expand(two_blocks(), limits), Err(StateSpaceError::Limit { what: "transitions", .. })));
}

#[test]
fn goal_initial_state_without_actions() {
    let dom = parse_domain(
        "(define (domain d) (:predicates (p) (q)) (:action a :parameters () :precondition (q) :effect (p)))",
    )
    .unwrap();
    let inst = parse_instance("(define (problem i) (:domain d) (:objects o) (:init (p)) (:goal (p)))", &dom).unwrap();
    let ss = expand(Arc::new(ground(&dom, &inst).unwrap()), ExpandLimits::default()).unwrap();
    assert_eq!((ss.num_states(), ss.num_transitions()), (1, 0));
    assert_eq!(ss.vstar[0], Some(0));
    assert_eq!(SampleSet::new(vec![ss]).diameter(), 0);
}

#[test]
fn chain_distances() {
    let dom = parse_domain(
        "(define (domain chain) (:predicates (a) (b) (g))
          (:action one :parameters () :precondition (a) :effect (and (b) (not (a))))
          (:action two :parameters () :precondition (b) :effect (and (g) (not (b)))))",
    )
    .unwrap();
    let inst =
        parse_instance("(define (problem c) (:domain chain) (:objects o) (:init (a)) (:goal (g)))", &dom).unwrap();
    let ss = expand(Arc::new(ground(&dom, &inst).unwrap()), ExpandLimits::default()).unwrap();
    assert_eq!(ss.num_states(), 3);
    assert_eq!(ss.vstar[0], Some(2));
    let s1 = ss.outgoing(0)[0].dst;
    assert_eq!(ss.vstar[s1 as usize], Some(1));
}

#[test]
fn sample_diameters() {
    let clear = space(blocks::domain(), blocks::clear_instance(&[blocks::block_names(5)], "b1"));
    assert_eq!(SampleSet::new(vec![clear]).diameter(), 7);
    let grip = space(gripper::domain(), gripper::instance(4));
    assert_eq!(SampleSet::new(vec![grip]).diameter(), 12);
}

// Spanner dead-ends: fewer usable spanners still reachable (carried, or
// lying at or ahead of the man) than loose nuts.
#[test]
fn spanner_dead_ends_match_counting_oracle() {
    let ss = space(spanner::domain(), spanner::instance(3, &[1, 2], 2));
    let gp = &ss.problem;
    let position = |loc: &str| match loc {
        "shed" => 0,
        "gate" => usize::MAX,
        l => l[1..].parse::<usize>().unwrap(),
    };
    let mut dead = 0;
    for (i, s) in ss.states.iter().enumerate() {
        let facts = gp.state_facts(s);
        let man =
            facts.iter().find(|f| f.predicate == "at" && f.args[0] == "bob").map(|f| position(&f.args[1])).unwrap();
        let usable = |sp: &str| facts.iter().any(|f| f.predicate == "useable" && f.args[0] == sp);
        let reachable = facts.iter().filter(|f| f.predicate == "carrying" && usable(&f.args[1])).count()
            + facts
                .iter()
                .filter(|f| f.predicate == "at" && f.args[0].starts_with("spanner") && usable(&f.args[0]))
                .filter(|f| position(&f.args[1]) >= man)
                .count();
        let loose = facts.iter().filter(|f| f.predicate == "loose").count();
        let expected = reachable < loose;
        assert_eq!(ss.is_deadend(i as u32), expected, "{facts:?}");
        dead += expected as usize;
    }
    assert!(dead > 0);
}

fn random_space(which: usize, seed: u64) -> StateSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match which {
        0 => space(blocks::domain(), blocks::random_clear_instance(&mut rng, 4)),
        1 => space(gripper::domain(), gripper::random_instance(&mut rng, 3)),
        2 => space(spanner::domain(), spanner::random_instance(&mut rng, 3, 2, 2)),
        3 => space(miconic::domain(), miconic::random_instance(&mut rng, 3, 2)),
        _ => space(blocks::domain(), blocks::random_on_instance(&mut rng, 4)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn vstar_is_a_shortest_distance(which in 0usize..5, seed in any::<u64>()) {
        let ss = random_space(which, seed);
        for s in 0..ss.num_states() as u32 {
            let succ: Vec<Option<u32>> = ss.outgoing(s).iter().map(|t| ss.vstar[t.dst as usize]).collect();
            let best = succ.iter().flatten().min().copied();
            match ss.vstar[s as usize] {
                Some(0) => prop_assert!(ss.is_goal(s)),
                Some(d) => {
                    prop_assert!(ss.is_alive(s));
                    prop_assert_eq!(best, Some(d - 1));
                }
                None => {
                    prop_assert!(ss.is_deadend(s));
                    prop_assert_eq!(best, None);
                }
            }
        }
    }

    #[test]
    fn transitions_are_sorted_and_reachable(which in 0usize..5, seed in any::<u64>()) {
        let ss = random_space(which, seed);
        let gp = ss.problem.clone();
        let mut seen = vec![false; ss.num_states()];
        seen[0] = true;
        for t in &ss.transitions {
            prop_assert!(gp.is_applicable(&ss.states[t.src as usize], t.action));
            prop_assert_eq!(&gp.apply(&ss.states[t.src as usize], t.action), &ss.states[t.dst as usize]);
            seen[t.dst as usize] = true;
        }
        prop_assert!(seen.iter().all(|&x| x));
        prop_assert!(ss.transitions.windows(2).all(|w| (w[0].src, w[0].action) < (w[1].src, w[1].action)));
        for s in 0..ss.num_states() as u32 {
            prop_assert_eq!(ss.outgoing(s).len(), gp.successors(&ss.states[s as usize]).len());
        }
    }
}
