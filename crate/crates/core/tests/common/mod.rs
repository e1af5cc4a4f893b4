//! Toy learning problems and a brute-force policy-existence oracle.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use genplan::domains::{blocks, gripper, miconic, spanner, visitall};
use genplan::features::FeaturePool;
use genplan::pipeline::{prepare_sample, prepare_with_pool, solve_loop, Prepared, RunConfig};
use genplan::statespace::{expand, ExpandLimits, SampleSet, StateSpace};
use genplan::strips::{ground, DomainModel, InstanceModel};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOY_STATES: usize = 30;
pub const TOY_FEATURES: usize = 8;

pub struct Toy {
    pub name: String,
    pub prepared: Prepared,
}

pub fn toy_config() -> RunConfig {
    RunConfig { max_complexity: 5, ..RunConfig::default() }
}

fn small_instance(rng: &mut ChaCha8Rng) -> (DomainModel, InstanceModel) {
    let k = rng.gen_range(1..=2);
    match rng.gen_range(0..7) {
        0 => (blocks::domain(), blocks::random_clear_instance(rng, 3)),
        1 => (blocks::domain(), blocks::random_on_instance(rng, k + 1)),
        2 => (gripper::domain(), gripper::random_instance(rng, 1)),
        3 => (spanner::domain(), spanner::random_instance(rng, k, 1, 1)),
        4 => (spanner::domain(), spanner::random_instance(rng, 1, 2, k)),
        5 => (miconic::domain(), miconic::random_instance(rng, 2, k)),
        _ => {
            let (r, c) = *[(1, 3), (2, 2), (1, 4)].choose(rng).unwrap();
            (visitall::domain(), visitall::random_instance(rng, r, c))
        }
    }
}

fn small_space(rng: &mut ChaCha8Rng) -> StateSpace {
    loop {
        let (dom, inst) = small_instance(rng);
        let gp = Arc::new(ground(&dom, &inst).unwrap());
        let limits = ExpandLimits { max_states: TOY_STATES, ..ExpandLimits::default() };
        if let Ok(space) = expand(gp, limits) {
            if space.num_alive() > 0 {
                return space;
            }
        }
    }
}

/// A toy problem: one small space (two of the same domain now and then),
/// with at most eight features from its pool.
pub fn toy(seed: u64) -> Toy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = small_space(&mut rng);
    let mut spaces = vec![first];
    if rng.gen_bool(0.25) {
        let domain = spaces[0].problem.domain_name.clone();
        for _ in 0..20 {
            let other = small_space(&mut rng);
            if other.problem.domain_name == domain {
                spaces.push(other);
                break;
            }
        }
    }
    let name = spaces.iter().map(|s| s.name().to_string()).collect::<Vec<_>>().join("+");
    let cfg = toy_config();
    let full = prepare_sample(SampleSet::new(spaces.clone()), &cfg).unwrap();
    // Mix of random cheap features and the features of an optimal policy over
    // the whole pool (sometimes with one of them dropped), padded at random.
    let mut features = Vec::new();
    if rng.gen_bool(0.6) {
        if let Some(sol) = solve_loop(&full, &cfg).unwrap().solution {
            features = sol.selected.iter().map(|&f| full.pool.features[f].clone()).collect();
            if rng.gen_bool(0.4) {
                features.remove(rng.gen_range(0..features.len()));
            }
        }
    }
    let mut rest: Vec<_> =
        full.pool.features.iter().take(2 * TOY_FEATURES).filter(|f| !features.contains(f)).cloned().collect();
    rest.shuffle(&mut rng);
    let target = rng.gen_range(3..=TOY_FEATURES).max(features.len());
    features.extend(rest.into_iter().take(target - features.len()));
    features.truncate(TOY_FEATURES);
    features.sort_by_key(|f| (f.weight(), f.to_string()));
    let pool = FeaturePool { features, ..Default::default() };
    let prepared = prepare_with_pool(SampleSet::new(spaces), pool, &cfg).unwrap();
    Toy { name, prepared }
}

/// Abstract transition: boolean source values and directions over a feature subset.
type Kind = Vec<(bool, Ordering)>;

struct Edge {
    src: usize,
    dst: usize,
    kind: usize,
}

/// Decides whether a policy over exactly the features in `mask` solves every
/// alive state of the sample, by searching over sets of allowed transition
/// kinds. Descending labels must fit in `[V*, slack * V*]`.
pub fn policy_exists(p: &Prepared, mask: u32, slack: u32) -> bool {
    let feats: Vec<usize> = (0..p.matrix.num_features()).filter(|f| mask >> f & 1 == 1).collect();
    let sample = &p.sample;
    let bools = |s: usize| feats.iter().map(|&f| p.matrix.values[f][s] > 0).collect::<Vec<bool>>();

    let (mut goals, mut others) = (Vec::new(), Vec::new());
    for s in 0..sample.num_states() {
        let (i, local) = sample.locate_state(s);
        if sample.spaces[i].is_goal(local) {
            goals.push(bools(s));
        } else {
            others.push(bools(s));
        }
    }
    if goals.iter().any(|g| others.contains(g)) {
        return false;
    }

    let mut kinds: HashMap<Kind, usize> = HashMap::new();
    let mut forbidden = Vec::new();
    let mut edges = Vec::new();
    let mut alive = Vec::new();
    let mut vstar = vec![0u32; sample.num_states()];
    for (i, space) in sample.spaces.iter().enumerate() {
        for s in 0..space.num_states() as u32 {
            let gs = sample.global_state(i, s);
            vstar[gs] = space.vstar[s as usize].unwrap_or(0);
            if !space.is_alive(s) {
                continue;
            }
            alive.push(gs);
            for t in space.outgoing(s) {
                let gd = sample.global_state(i, t.dst);
                let kind: Kind = feats
                    .iter()
                    .map(|&f| (p.matrix.values[f][gs] > 0, p.matrix.values[f][gd].cmp(&p.matrix.values[f][gs])))
                    .collect();
                let next = kinds.len();
                let k = *kinds.entry(kind).or_insert(next);
                if k == forbidden.len() {
                    forbidden.push(false);
                }
                if space.is_deadend(t.dst) {
                    forbidden[k] = true;
                } else {
                    edges.push(Edge { src: gs, dst: gd, kind: k });
                }
            }
        }
    }
    let choice: Vec<Option<bool>> = forbidden.iter().map(|&f| if f { Some(false) } else { None }).collect();
    Search { n: sample.num_states(), edges: &edges, alive: &alive, vstar: &vstar, slack }.run(choice)
}

struct Search<'a> {
    n: usize,
    edges: &'a [Edge],
    alive: &'a [usize],
    vstar: &'a [u32],
    slack: u32,
}

impl Search<'_> {
    /// The allowed graph is acyclic and admits labels in `[V*, slack * V*]`
    /// that strictly decrease along allowed edges. The smallest such labels
    /// are `max(V*(s), 1 + label of any allowed successor)`.
    fn ranked(&self, allowed: &dyn Fn(usize) -> bool) -> bool {
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for e in self.edges.iter().filter(|e| allowed(e.kind)) {
            out[e.src].push(e.dst);
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut mark = vec![0u8; self.n];
        let mut label = self.vstar.to_vec();
        fn visit(s: usize, out: &[Vec<usize>], mark: &mut [u8], label: &mut [u32]) -> bool {
            mark[s] = 1;
            for &d in &out[s] {
                if mark[d] == 1 || (mark[d] == 0 && !visit(d, out, mark, label)) {
                    return false;
                }
                label[s] = label[s].max(label[d] + 1);
            }
            mark[s] = 2;
            true
        }
        for s in 0..self.n {
            if mark[s] == 0 && !visit(s, &out, &mut mark, &mut label) {
                return false;
            }
        }
        self.alive.iter().all(|&s| label[s] <= self.slack * self.vstar[s])
    }

    fn complete(&self, allowed: &dyn Fn(usize) -> bool) -> bool {
        let mut covered = vec![false; self.n];
        for e in self.edges.iter().filter(|e| allowed(e.kind)) {
            covered[e.src] = true;
        }
        self.alive.iter().all(|&s| covered[s])
    }

    fn run(&self, mut choice: Vec<Option<bool>>) -> bool {
        if !self.ranked(&|k| choice[k] == Some(true)) || !self.complete(&|k| choice[k] != Some(false)) {
            return false;
        }
        if self.complete(&|k| choice[k] == Some(true)) {
            return true;
        }
        let Some(k) = choice.iter().position(Option::is_none) else { return false };
        choice[k] = Some(true);
        if self.run(choice.clone()) {
            return true;
        }
        choice[k] = Some(false);
        self.run(choice)
    }
}

/// Cheapest feature subset admitting a solving policy, by enumeration.
pub fn brute_force_optimum(p: &Prepared, slack: u32) -> Option<u64> {
    let n = p.matrix.num_features();
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    let cost = |m: u32| (0..n).filter(|f| m >> f & 1 == 1).map(|f| p.weights[f] as u64).sum::<u64>();
    masks.sort_by_key(|&m| cost(m));
    masks.into_iter().find(|&m| policy_exists(p, m, slack)).map(cost)
}
