use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Policy;
use crate::features::InstanceView;
use crate::strips::{GroundProblem, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    First,
    Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    NoCompatibleTransition,
    Cycle,
    StepLimit,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Failure::NoCompatibleTransition => "no-compatible-transition",
            Failure::Cycle => "cycle",
            Failure::StepLimit => "step-limit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Execution {
    /// Action ids of a trajectory ending in a goal state.
    Reached(Vec<u32>),
    Failed {
        reason: Failure,
        steps: usize,
    },
}

impl Execution {
    pub fn reached(&self) -> bool {
        matches!(self, Execution::Reached(_))
    }
}

/// Follows policy-compatible transitions from the initial state, evaluating
/// features on the fly. Stops at a goal, a revisited state, a state without
/// compatible successors, or after `max_steps` steps (default 10 m² for m
/// objects).
pub fn greedy_execute(gp: &GroundProblem, policy: &Policy, max_steps: Option<usize>, tie: TieBreak) -> Execution {
    let view = InstanceView::new(gp);
    let eval = |s: &State| policy.features.iter().map(|f| view.feature(f, s)).collect::<Vec<u32>>();
    let max_steps = max_steps.unwrap_or(10 * gp.objects.len() * gp.objects.len());
    let mut rng = match tie {
        TieBreak::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        TieBreak::First => None,
    };
    let mut state = gp.init.clone();
    let mut values = eval(&state);
    let mut visited = HashSet::from([state.clone()]);
    let mut plan = Vec::new();
    while !gp.is_goal(&state) {
        if plan.len() >= max_steps {
            return Execution::Failed { reason: Failure::StepLimit, steps: plan.len() };
        }
        let mut options: Vec<_> = gp
            .successors(&state)
            .into_iter()
            .map(|(a, next)| {
                let v = eval(&next);
                (a, next, v)
            })
            .filter(|(_, _, v)| policy.compatible(&values, v))
            .collect();
        if let Some(rng) = rng.as_mut() {
            options.shuffle(rng);
        }
        let Some((a, next, v)) = options.into_iter().next() else {
            return Execution::Failed { reason: Failure::NoCompatibleTransition, steps: plan.len() };
        };
        plan.push(a);
        if !visited.insert(next.clone()) {
            return Execution::Failed { reason: Failure::Cycle, steps: plan.len() };
        }
        state = next;
        values = v;
    }
    Execution::Reached(plan)
}
