//! Benchmark domains with seeded instance generators.
//!
//! Each domain is embedded as PDDL text; generators build [`InstanceModel`]s
//! directly, and [`instance_to_pddl`](crate::strips::instance_to_pddl) turns
//! them into problem files when needed.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::strips::{parse_domain, DomainModel, Fact, InstanceModel, TypedName};

fn typed(names: &[String], ty: &str) -> Vec<TypedName> {
    names.iter().map(|n| TypedName::new(n.clone(), ty)).collect()
}

fn fact(p: &str, args: &[&str]) -> Fact {
    Fact::new(p, args)
}

fn instance(name: String, domain: &str, objects: Vec<TypedName>, init: Vec<Fact>, goal: Vec<Fact>) -> InstanceModel {
    InstanceModel { name, domain: domain.to_string(), objects, init, goal, goal_parameters: Vec::new() }
}

pub mod gripper {
    use super::*;

    pub const PDDL: &str = r#"(define (domain gripper-strips)
  (:predicates (room ?r) (ball ?b) (gripper ?g) (at-robby ?r) (at ?b ?r) (free ?g) (carry ?o ?g))
  (:action move
    :parameters (?from ?to)
    :precondition (and (room ?from) (room ?to) (at-robby ?from))
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?obj ?room ?gripper)
    :precondition (and (ball ?obj) (room ?room) (gripper ?gripper) (at ?obj ?room) (at-robby ?room) (free ?gripper))
    :effect (and (carry ?obj ?gripper) (not (at ?obj ?room)) (not (free ?gripper))))
  (:action drop
    :parameters (?obj ?room ?gripper)
    :precondition (and (ball ?obj) (room ?room) (gripper ?gripper) (carry ?obj ?gripper) (at-robby ?room))
    :effect (and (at ?obj ?room) (free ?gripper) (not (carry ?obj ?gripper)))))
"#;

    pub fn domain() -> DomainModel {
        parse_domain(PDDL).expect("embedded gripper domain parses")
    }

    /// Balls listed in `in_b` start in room B, the rest in room A; the
    /// robot starts in A (or B if `robot_in_b`). Goal: every ball in B.
    pub fn instance_with(n_balls: usize, in_b: &[usize], robot_in_b: bool) -> InstanceModel {
        let balls: Vec<String> = (1..=n_balls).map(|i| format!("ball{i}")).collect();
        let mut objects = typed(&["rooma".into(), "roomb".into(), "left".into(), "right".into()], "object");
        objects.extend(typed(&balls, "object"));
        let mut init = vec![
            fact("room", &["rooma"]),
            fact("room", &["roomb"]),
            fact("gripper", &["left"]),
            fact("gripper", &["right"]),
            fact("free", &["left"]),
            fact("free", &["right"]),
            fact("at-robby", &[if robot_in_b { "roomb" } else { "rooma" }]),
        ];
        for (i, b) in balls.iter().enumerate() {
            init.push(fact("ball", &[b]));
            init.push(fact("at", &[b, if in_b.contains(&(i + 1)) { "roomb" } else { "rooma" }]));
        }
        let goal = balls.iter().map(|b| fact("at", &[b, "roomb"])).collect();
        super::instance(format!("gripper-{n_balls}"), "gripper-strips", objects, init, goal)
    }

    /// The standard instance: all balls and the robot in room A.
    pub fn instance(n_balls: usize) -> InstanceModel {
        instance_with(n_balls, &[], false)
    }

    /// Between 1 and `max_balls` balls placed at random; at least one starts in A.
    pub fn random_instance<R: Rng>(rng: &mut R, max_balls: usize) -> InstanceModel {
        let n = rng.gen_range(1..=max_balls);
        let mut in_b: Vec<usize> = (1..=n).filter(|_| rng.gen_bool(0.3)).collect();
        if in_b.len() == n {
            in_b.pop();
        }
        let mut inst = instance_with(n, &in_b, rng.gen_bool(0.5));
        inst.name = format!("gripper-{n}-r{}", rng.gen::<u16>());
        inst
    }
}

pub mod blocks {
    use super::*;

    pub const PDDL: &str = r#"(define (domain blocks)
  (:requirements :strips)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x))
  (:action pick-up
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x)))
  (:action put-down
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y)))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty)) (not (on ?x ?y)))))
"#;

    pub fn domain() -> DomainModel {
        parse_domain(PDDL).expect("embedded blocks domain parses")
    }

    pub fn block_names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("b{i}")).collect()
    }

    /// Initial facts for towers listed bottom to top, with an empty hand.
    pub fn tower_facts(towers: &[Vec<String>]) -> Vec<Fact> {
        let mut init = vec![fact("handempty", &[])];
        for t in towers {
            for (i, b) in t.iter().enumerate() {
                if i == 0 {
                    init.push(fact("ontable", &[b]));
                } else {
                    init.push(fact("on", &[b, &t[i - 1]]));
                }
            }
            if let Some(top) = t.last() {
                init.push(fact("clear", &[top]));
            }
        }
        init
    }

    /// Random towers: a random permutation cut at random points.
    pub fn random_towers<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<String>> {
        let mut names = block_names(n);
        names.shuffle(rng);
        let mut towers: Vec<Vec<String>> = Vec::new();
        for b in names {
            match towers.last_mut() {
                Some(t) if rng.gen_bool(0.6) => t.push(b),
                _ => towers.push(vec![b]),
            }
        }
        towers
    }

    /// Goal `clear(x)` with `x` as goal parameter.
    pub fn clear_instance(towers: &[Vec<String>], x: &str) -> InstanceModel {
        let n: usize = towers.iter().map(Vec::len).sum();
        let objects = typed(&block_names(n), "object");
        let inst =
            super::instance(format!("clear-{n}"), "blocks", objects, tower_facts(towers), vec![fact("clear", &[x])]);
        inst.with_goal_parameter("x", x)
    }

    /// Random `clear(x)` instance with `n` blocks where `x` is not clear initially
    /// (when `n > 1`).
    pub fn random_clear_instance<R: Rng>(rng: &mut R, n: usize) -> InstanceModel {
        let towers = loop {
            let t = random_towers(rng, n);
            if n == 1 || t.iter().any(|t| t.len() > 1) {
                break t;
            }
        };
        let buried: Vec<&String> = towers.iter().flat_map(|t| &t[..t.len() - 1]).collect();
        let x = if buried.is_empty() { towers[0][0].clone() } else { buried[rng.gen_range(0..buried.len())].clone() };
        let mut inst = clear_instance(&towers, &x);
        inst.name = format!("clear-{n}-r{}", rng.gen::<u16>());
        inst
    }

    /// Goal `on(x, y)` with goal parameters `x` and `y`.
    pub fn on_instance(towers: &[Vec<String>], x: &str, y: &str) -> InstanceModel {
        let n: usize = towers.iter().map(Vec::len).sum();
        let objects = typed(&block_names(n), "object");
        let inst =
            super::instance(format!("on-{n}"), "blocks", objects, tower_facts(towers), vec![fact("on", &[x, y])]);
        inst.with_goal_parameter("x", x).with_goal_parameter("y", y)
    }

    pub fn random_on_instance<R: Rng>(rng: &mut R, n: usize) -> InstanceModel {
        assert!(n >= 2, "on(x, y) needs two blocks");
        let towers = random_towers(rng, n);
        let names = block_names(n);
        let pair: Vec<&String> = names.choose_multiple(rng, 2).collect();
        let mut inst = on_instance(&towers, pair[0], pair[1]);
        inst.name = format!("on-{n}-r{}", rng.gen::<u16>());
        inst
    }
}

pub mod visitall {
    use super::*;

    pub const PDDL: &str = r#"(define (domain grid-visit-all)
  (:requirements :typing)
  (:types place - object)
  (:predicates (connected ?x ?y - place) (at-robot ?x - place) (visited ?x - place))
  (:action move
    :parameters (?curpos ?nextpos - place)
    :precondition (and (at-robot ?curpos) (connected ?curpos ?nextpos))
    :effect (and (at-robot ?nextpos) (not (at-robot ?curpos)) (visited ?nextpos))))
"#;

    pub fn domain() -> DomainModel {
        parse_domain(PDDL).expect("embedded visitall domain parses")
    }

    pub fn cell(r: usize, c: usize) -> String {
        format!("c{r}-{c}")
    }

    /// A `rows` x `cols` grid, robot at `start`; goal: every cell visited.
    pub fn instance(rows: usize, cols: usize, start: (usize, usize)) -> InstanceModel {
        let mut cells = Vec::new();
        let mut init = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                cells.push(cell(r, c));
                let here = cell(r, c);
                let mut link = |r2: usize, c2: usize| init.push(fact("connected", &[&here, &cell(r2, c2)]));
                if r > 0 {
                    link(r - 1, c);
                }
                if r + 1 < rows {
                    link(r + 1, c);
                }
                if c > 0 {
                    link(r, c - 1);
                }
                if c + 1 < cols {
                    link(r, c + 1);
                }
            }
        }
        let s = cell(start.0, start.1);
        init.push(fact("at-robot", &[&s]));
        init.push(fact("visited", &[&s]));
        let goal = cells.iter().map(|c| fact("visited", &[c])).collect();
        super::instance(
            format!("visitall-{rows}x{cols}-{}-{}", start.0, start.1),
            "grid-visit-all",
            typed(&cells, "place"),
            init,
            goal,
        )
    }

    pub fn random_instance<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> InstanceModel {
        instance(rows, cols, (rng.gen_range(0..rows), rng.gen_range(0..cols)))
    }
}

pub mod spanner {
    use super::*;

    pub const PDDL: &str = r#"(define (domain spanner)
  (:requirements :typing :strips)
  (:types location locatable - object man nut spanner - locatable)
  (:predicates (at ?m - locatable ?l - location) (carrying ?m - man ?s - spanner) (useable ?s - spanner)
               (link ?l1 - location ?l2 - location) (tightened ?n - nut) (loose ?n - nut))
  (:action walk
    :parameters (?start - location ?end - location ?m - man)
    :precondition (and (at ?m ?start) (link ?start ?end))
    :effect (and (not (at ?m ?start)) (at ?m ?end)))
  (:action pickup_spanner
    :parameters (?l - location ?s - spanner ?m - man)
    :precondition (and (at ?m ?l) (at ?s ?l))
    :effect (and (not (at ?s ?l)) (carrying ?m ?s)))
  (:action tighten_nut
    :parameters (?l - location ?s - spanner ?m - man ?n - nut)
    :precondition (and (at ?m ?l) (at ?n ?l) (carrying ?m ?s) (useable ?s) (loose ?n))
    :effect (and (not (loose ?n)) (not (useable ?s)) (tightened ?n))))
"#;

    pub fn domain() -> DomainModel {
        parse_domain(PDDL).expect("embedded spanner domain parses")
    }

    /// A one-way corridor shed -> l1 .. l<n> -> gate. Spanner `i` lies at
    /// corridor position `spanner_at[i]` (1-based); all nuts are at the gate.
    pub fn instance(corridor: usize, spanner_at: &[usize], nuts: usize) -> InstanceModel {
        let mut locations = vec!["shed".to_string()];
        locations.extend((1..=corridor).map(|i| format!("l{i}")));
        locations.push("gate".into());
        let spanners: Vec<String> = (1..=spanner_at.len()).map(|i| format!("spanner{i}")).collect();
        let nut_names: Vec<String> = (1..=nuts).map(|i| format!("nut{i}")).collect();
        let mut objects = typed(&locations, "location");
        objects.push(TypedName::new("bob", "man"));
        objects.extend(typed(&spanners, "spanner"));
        objects.extend(typed(&nut_names, "nut"));
        let mut init = vec![fact("at", &["bob", "shed"])];
        for w in locations.windows(2) {
            init.push(fact("link", &[&w[0], &w[1]]));
        }
        for (s, &pos) in spanners.iter().zip(spanner_at) {
            assert!((1..=corridor).contains(&pos), "spanner position {pos} outside corridor");
            init.push(fact("at", &[s, &locations[pos]]));
            init.push(fact("useable", &[s]));
        }
        for n in &nut_names {
            init.push(fact("at", &[n, "gate"]));
            init.push(fact("loose", &[n]));
        }
        let goal = nut_names.iter().map(|n| fact("tightened", &[n])).collect();
        let tag: Vec<String> = spanner_at.iter().map(|p| p.to_string()).collect();
        super::instance(format!("spanner-{corridor}-{}-{nuts}", tag.join("_")), "spanner", objects, init, goal)
    }

    pub fn random_instance<R: Rng>(rng: &mut R, corridor: usize, spanners: usize, nuts: usize) -> InstanceModel {
        let at: Vec<usize> = (0..spanners).map(|_| rng.gen_range(1..=corridor)).collect();
        instance(corridor, &at, nuts)
    }
}

pub mod miconic {
    use super::*;

    /// Boarding removes the origin fact, so a passenger boards at most once.
    pub const PDDL: &str = r#"(define (domain miconic)
  (:requirements :strips :typing)
  (:types passenger floor - object)
  (:predicates (origin ?person - passenger ?floor - floor) (destin ?person - passenger ?floor - floor)
               (above ?floor1 - floor ?floor2 - floor) (boarded ?person - passenger)
               (served ?person - passenger) (lift-at ?floor - floor))
  (:action board
    :parameters (?f - floor ?p - passenger)
    :precondition (and (lift-at ?f) (origin ?p ?f))
    :effect (and (boarded ?p) (not (origin ?p ?f))))
  (:action depart
    :parameters (?f - floor ?p - passenger)
    :precondition (and (lift-at ?f) (destin ?p ?f) (boarded ?p))
    :effect (and (not (boarded ?p)) (served ?p)))
  (:action up
    :parameters (?f1 - floor ?f2 - floor)
    :precondition (and (lift-at ?f1) (above ?f1 ?f2))
    :effect (and (lift-at ?f2) (not (lift-at ?f1))))
  (:action down
    :parameters (?f1 - floor ?f2 - floor)
    :precondition (and (lift-at ?f1) (above ?f2 ?f1))
    :effect (and (lift-at ?f2) (not (lift-at ?f1)))))
"#;

    pub fn domain() -> DomainModel {
        parse_domain(PDDL).expect("embedded miconic domain parses")
    }

    /// `passengers[i] = (origin, destination)` as floor indices.
    pub fn instance(floors: usize, passengers: &[(usize, usize)], lift_at: usize) -> InstanceModel {
        let floor_names: Vec<String> = (0..floors).map(|i| format!("f{i}")).collect();
        let people: Vec<String> = (1..=passengers.len()).map(|i| format!("p{i}")).collect();
        let mut objects = typed(&floor_names, "floor");
        objects.extend(typed(&people, "passenger"));
        let mut init = vec![fact("lift-at", &[&floor_names[lift_at]])];
        for i in 0..floors {
            for j in i + 1..floors {
                init.push(fact("above", &[&floor_names[i], &floor_names[j]]));
            }
        }
        for (p, &(o, d)) in people.iter().zip(passengers) {
            init.push(fact("origin", &[p, &floor_names[o]]));
            init.push(fact("destin", &[p, &floor_names[d]]));
        }
        let goal = people.iter().map(|p| fact("served", &[p])).collect();
        super::instance(format!("miconic-{floors}-{}", passengers.len()), "miconic", objects, init, goal)
    }

    pub fn random_instance<R: Rng>(rng: &mut R, floors: usize, passengers: usize) -> InstanceModel {
        let trips: Vec<(usize, usize)> = (0..passengers)
            .map(|_| {
                let o = rng.gen_range(0..floors);
                let mut d = rng.gen_range(0..floors - 1);
                if d >= o {
                    d += 1;
                }
                (o, d)
            })
            .collect();
        let mut inst = instance(floors, &trips, rng.gen_range(0..floors));
        inst.name = format!("miconic-{floors}-{passengers}-r{}", rng.gen::<u16>());
        inst
    }
}
