//! Parses a PDDL domain and problem, grounds them and applies a few actions.

use genplan::strips::{ground, parse_domain, parse_instance};

const DOMAIN: &str = "
(define (domain blocks)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x))
  (:action pick-up :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x)))
  (:action put-down :parameters (?x)
    :precondition (holding ?x)
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y)))
  (:action unstack :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty)) (not (on ?x ?y)))))";

const PROBLEM: &str = "
;; @goal-parameter x a
(define (problem clear-a)
  (:domain blocks)
  (:objects a b c)
  (:init (handempty) (ontable a) (on b a) (on c b) (clear c))
  (:goal (clear a)))";

fn main() {
    let domain = parse_domain(DOMAIN).expect("domain parses");
    let instance = parse_instance(PROBLEM, &domain).expect("problem parses");
    let gp = ground(&domain, &instance).expect("grounding succeeds");
    println!(
        "{}: {} objects, {} atoms, {} actions, goal parameters {:?}",
        gp.name,
        gp.objects.len(),
        gp.atoms.len(),
        gp.actions.len(),
        gp.goal_parameters
    );

    let mut state = gp.init.clone();
    for step in 0.. {
        let facts: Vec<String> = gp.state_facts(&state).iter().map(|f| format!("{f}")).collect();
        println!("s{step}: {}", facts.join(" "));
        if gp.is_goal(&state) {
            println!("goal reached");
            break;
        }
        // Unstack whatever is applicable, otherwise put the held block down.
        let (action, next) = gp
            .successors(&state)
            .into_iter()
            .find(|(a, _)| gp.action_name(*a).starts_with("unstack") || gp.action_name(*a).starts_with("put-down"))
            .expect("some action applies");
        println!("  {}", gp.action_name(action));
        state = next;
    }
}
