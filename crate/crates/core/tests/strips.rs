use std::collections::BTreeSet;

use genplan::domains::{blocks, gripper, miconic, spanner, visitall};
use genplan::strips::{
    domain_to_pddl, ground, instance_to_pddl, parse_domain, parse_instance, sexpr, DomainModel, Fact, InstanceModel,
    PddlError, State, Term,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bind(t: &Term, params: &[String], args: &[String]) -> String {
    match t {
        Term::Var(v) => args[params.iter().position(|p| p == v).unwrap()].clone(),
        Term::Const(c) => c.clone(),
    }
}

// Brute-force grounding: every type-consistent binding whose static
// preconditions hold initially, as (schema, args, pre, add, del) strings.
fn oracle_actions(dom: &DomainModel, inst: &InstanceModel) -> BTreeSet<String> {
    let statics: Vec<&str> = dom.static_predicates();
    let init: BTreeSet<String> = inst.init.iter().map(|f| f.to_string()).collect();
    let objects: Vec<(String, String)> =
        inst.objects.iter().chain(&dom.constants).map(|o| (o.name.clone(), o.ty.clone())).collect();
    let mut out = BTreeSet::new();
    for a in &dom.actions {
        let params: Vec<String> = a.params.iter().map(|p| p.name.clone()).collect();
        let choices: Vec<Vec<String>> = a
            .params
            .iter()
            .map(|p| objects.iter().filter(|(_, t)| dom.is_subtype(t, &p.ty)).map(|(n, _)| n.clone()).collect())
            .collect();
        let mut idx = vec![0usize; params.len()];
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        'bindings: loop {
            let args: Vec<String> = idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
            let atom = |x: &genplan::strips::SchemaAtom| {
                format!(
                    "{}({})",
                    x.predicate,
                    x.args.iter().map(|t| bind(t, &params, &args)).collect::<Vec<_>>().join(",")
                )
            };
            let static_ok =
                a.pre.iter().filter(|p| statics.contains(&p.predicate.as_str())).all(|p| init.contains(&atom(p)));
            if static_ok {
                let set = |xs: &[genplan::strips::SchemaAtom]| xs.iter().map(atom).collect::<BTreeSet<_>>();
                let add = set(&a.add);
                // a delete of an atom the action also adds has no effect
                let del: BTreeSet<String> = set(&a.del).difference(&add).cloned().collect();
                out.insert(format!("{}({}) pre{:?} add{:?} del{:?}", a.name, args.join(","), set(&a.pre), add, del));
            }
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break 'bindings;
                }
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
    out
}

fn ground_actions(dom: &DomainModel, inst: &InstanceModel) -> BTreeSet<String> {
    let gp = ground(dom, inst).unwrap();
    (0..gp.actions.len() as u32)
        .map(|a| {
            let act = &gp.actions[a as usize];
            let set = |xs: &[u32]| xs.iter().map(|&x| gp.atom_fact(x).to_string()).collect::<BTreeSet<_>>();
            format!("{} pre{:?} add{:?} del{:?}", gp.action_name(a), set(&act.pre), set(&act.add), set(&act.del))
        })
        .collect()
}

#[test]
fn blocks_domain_predicates() {
    let dom = blocks::domain();
    let preds: BTreeSet<(String, usize)> = dom.predicates.iter().map(|p| (p.name.clone(), p.arity())).collect();
    let expected: BTreeSet<(String, usize)> =
        [("on", 2), ("ontable", 1), ("clear", 1), ("holding", 1), ("handempty", 0)]
            .iter()
            .map(|(n, a)| (n.to_string(), *a))
            .collect();
    assert_eq!(preds, expected);
    assert_eq!(dom.actions.len(), 4);
}

#[test]
fn domain_without_actions_is_valid() {
    let dom = parse_domain("(define (domain empty) (:predicates (p)))").unwrap();
    assert!(dom.actions.is_empty());
}

#[test]
fn conditional_effects_are_rejected() {
    let text = "(define (domain d) (:predicates (p ?x) (q ?x))
      (:action a :parameters (?x) :precondition (p ?x) :effect (when (p ?x) (q ?x))))";
    assert!(matches!(parse_domain(text), Err(PddlError::Unsupported { .. })));
}

#[test]
fn negative_preconditions_are_rejected() {
    let text = "(define (domain d) (:predicates (p ?x) (q ?x))
      (:action a :parameters (?x) :precondition (not (p ?x)) :effect (q ?x)))";
    assert!(parse_domain(text).is_err());
}

#[test]
fn clear_instance_goal() {
    let dom = blocks::domain();
    let inst = blocks::clear_instance(&[blocks::block_names(5)], "b1");
    let parsed = parse_instance(&instance_to_pddl(&inst), &dom).unwrap();
    assert_eq!(parsed.goal, vec![Fact::new("clear", &["b1"])]);
    assert_eq!(parsed.goal_parameters, vec![("x".to_string(), "b1".to_string())]);
}

#[test]
fn empty_goal_makes_every_state_a_goal() {
    let dom = blocks::domain();
    let text =
        "(define (problem p) (:domain blocks) (:objects a) (:init (ontable a) (clear a) (handempty)) (:goal (and)))";
    let gp = ground(&dom, &parse_instance(text, &dom).unwrap()).unwrap();
    assert!(gp.is_goal(&gp.init));
    for (_, s) in gp.successors(&gp.init) {
        assert!(gp.is_goal(&s));
    }
}

#[test]
fn goal_with_wrong_arity_is_rejected() {
    let dom = blocks::domain();
    let text = "(define (problem p) (:domain blocks) (:objects a b) (:init (handempty)) (:goal (clear a b)))";
    assert!(parse_instance(text, &dom).is_err());
}

#[test]
fn unknown_goal_parameter_object_is_rejected() {
    let dom = blocks::domain();
    let text = ";; @goal-parameter x zz\n(define (problem p) (:domain blocks) (:objects a) (:init (handempty)) (:goal (clear a)))";
    assert!(parse_instance(text, &dom).is_err());
}

#[test]
fn gripper_grounding_matches_enumeration() {
    let dom = gripper::domain();
    let inst = gripper::instance(4);
    let actions = ground_actions(&dom, &inst);
    assert_eq!(actions, oracle_actions(&dom, &inst));
    // pick and drop: 4 balls x 2 rooms x 2 grippers each; move: 2 x 2 room pairs
    assert_eq!(actions.len(), 2 * 4 * 2 * 2 + 4);
}

#[test]
fn grounding_matches_enumeration_on_all_domains() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cases: Vec<(DomainModel, InstanceModel)> = vec![
        (blocks::domain(), blocks::clear_instance(&[blocks::block_names(5)], "b1")),
        (blocks::domain(), blocks::random_on_instance(&mut rng, 4)),
        (visitall::domain(), visitall::instance(3, 3, (1, 1))),
        (spanner::domain(), spanner::instance(3, &[1, 2], 2)),
        (miconic::domain(), miconic::random_instance(&mut rng, 3, 2)),
    ];
    for (dom, inst) in cases {
        assert_eq!(ground_actions(&dom, &inst), oracle_actions(&dom, &inst), "{}", inst.name);
    }
}

#[test]
fn nullary_domain_grounds_to_its_schemas() {
    let dom = parse_domain(
        "(define (domain n) (:predicates (p) (q))
          (:action a :parameters () :precondition (p) :effect (and (q) (not (p))))
          (:action b :parameters () :precondition (q) :effect (p)))",
    )
    .unwrap();
    let inst = parse_instance("(define (problem i) (:domain n) (:objects o) (:init (p)) (:goal (q)))", &dom).unwrap();
    let gp = ground(&dom, &inst).unwrap();
    let names: Vec<String> = (0..gp.actions.len() as u32).map(|a| gp.action_name(a)).collect();
    assert_eq!(names, vec!["a()", "b()"]);
}

#[test]
fn two_block_initial_successors() {
    let dom = blocks::domain();
    let text = "(define (problem two) (:domain blocks) (:objects a b)
      (:init (handempty) (ontable a) (on b a) (clear b)) (:goal (clear a)))";
    let gp = ground(&dom, &parse_instance(text, &dom).unwrap()).unwrap();
    let succ = gp.successors(&gp.init);
    let names: Vec<String> = succ.iter().map(|(a, _)| gp.action_name(*a)).collect();
    assert_eq!(names, vec!["unstack(b,a)"]);
    let facts: BTreeSet<String> = gp.state_facts(&succ[0].1).iter().map(|f| f.to_string()).collect();
    let expected: BTreeSet<String> = ["clear(a)", "holding(b)", "ontable(a)"].iter().map(|s| s.to_string()).collect();
    assert_eq!(facts, expected);
}

#[test]
fn goal_states_keep_their_successors() {
    let dom = blocks::domain();
    let inst = blocks::clear_instance(&[vec!["b1".into()], vec!["b2".into()]], "b1");
    let gp = ground(&dom, &inst).unwrap();
    assert!(gp.is_goal(&gp.init));
    assert!(!gp.successors(&gp.init).is_empty());
}

#[test]
fn state_without_applicable_actions_has_no_successors() {
    let gp = ground(&blocks::domain(), &blocks::clear_instance(&[blocks::block_names(2)], "b1")).unwrap();
    assert!(gp.successors(&State::empty(gp.num_atoms())).is_empty());
}

#[test]
fn grounding_is_deterministic() {
    let dom = visitall::domain();
    let inst = visitall::instance(3, 4, (0, 2));
    let (a, b) = (ground(&dom, &inst).unwrap(), ground(&dom, &inst).unwrap());
    assert_eq!(a.atoms, b.atoms);
    assert_eq!(a.actions, b.actions);
    assert_eq!(a.init, b.init);
}

#[test]
fn domains_round_trip_through_pddl() {
    for dom in [blocks::domain(), gripper::domain(), visitall::domain(), spanner::domain(), miconic::domain()] {
        let again = parse_domain(&domain_to_pddl(&dom)).unwrap();
        assert_eq!(again, dom);
    }
}

fn random_walk_case() -> impl Strategy<Value = (usize, u64)> {
    (0usize..4, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // pre(a) ⊆ s and s' = (s \ del(a)) ∪ add(a) along random walks.
    #[test]
    fn successors_follow_strips_semantics((which, seed) in random_walk_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (dom, inst) = match which {
            0 => (blocks::domain(), blocks::random_clear_instance(&mut rng, 5)),
            1 => (gripper::domain(), gripper::random_instance(&mut rng, 4)),
            2 => (spanner::domain(), spanner::random_instance(&mut rng, 4, 2, 2)),
            _ => (miconic::domain(), miconic::random_instance(&mut rng, 4, 3)),
        };
        let gp = ground(&dom, &inst).unwrap();
        let mut s = gp.init.clone();
        for _ in 0..30 {
            let succ = gp.successors(&s);
            for (a, next) in &succ {
                let act = &gp.actions[*a as usize];
                prop_assert!(act.pre.iter().all(|&p| s.contains(p)));
                let mut expected: BTreeSet<u32> = s.atoms().collect();
                for d in &act.del {
                    expected.remove(d);
                }
                expected.extend(act.add.iter().copied());
                prop_assert_eq!(next.atoms().collect::<BTreeSet<u32>>(), expected);
            }
            let applicable: Vec<u32> = (0..gp.actions.len() as u32)
                .filter(|&a| gp.actions[a as usize].pre.iter().all(|&p| s.contains(p)))
                .collect();
            prop_assert_eq!(succ.iter().map(|(a, _)| *a).collect::<Vec<_>>(), applicable);
            if succ.is_empty() {
                break;
            }
            s = succ[rng.gen_range(0..succ.len())].1.clone();
        }
    }
}

#[test]
fn generated_instances_round_trip_through_pddl() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cases: Vec<(DomainModel, InstanceModel)> = vec![
        (gripper::domain(), gripper::random_instance(&mut rng, 6)),
        (blocks::domain(), blocks::random_clear_instance(&mut rng, 5)),
        (blocks::domain(), blocks::random_on_instance(&mut rng, 4)),
        (visitall::domain(), visitall::instance(3, 3, (1, 1))),
        (spanner::domain(), spanner::random_instance(&mut rng, 3, 2, 1)),
        (miconic::domain(), miconic::random_instance(&mut rng, 3, 2)),
    ];
    for (dom, inst) in cases {
        let text = instance_to_pddl(&inst);
        assert_eq!(parse_instance(&text, &dom).unwrap(), inst, "{text}");
        ground(&dom, &inst).unwrap();
    }
}

#[test]
fn sexpr_nested_lists_and_comments() {
    let e = sexpr::parse("; header\n(define (Domain X) ; trailing\n  (:predicates (p ?x)))").unwrap();
    assert_eq!(e.to_string(), "(define (domain x) (:predicates (p ?x)))");
    assert_eq!(e.head(), Some("define"));
}

#[test]
fn sexpr_errors_carry_positions() {
    let err = sexpr::parse("(a\n  (b c)").unwrap_err();
    assert!(err.to_string().contains("1:1"), "{err}");
    let err = sexpr::parse("(a))").unwrap_err();
    assert!(err.to_string().contains("1:4"), "{err}");
}

#[test]
fn state_set_operations() {
    let mut s = State::from_atoms(130, [0, 64, 129]);
    assert!(s.contains(64) && !s.contains(63));
    s.remove(64);
    s.insert(5);
    assert_eq!(s.atoms().collect::<Vec<_>>(), vec![0, 5, 129]);
    assert_eq!(s.len(), 3);
    assert_eq!(s, State::from_atoms(130, [129, 5, 0]));
}
