use super::Policy;
use crate::features::InstanceView;
use crate::statespace::{StateSpace, Transition};
use crate::strips::State;

/// Outcome of checking a policy on every alive state of one space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub instance: String,
    pub alive: usize,
    pub compatible_transitions: usize,
    /// Alive states without a compatible outgoing transition.
    pub incomplete: Vec<u32>,
    /// Compatible transitions from alive states into dead-ends.
    pub into_deadends: Vec<Transition>,
    /// States along a cycle of compatible transitions, if there is one.
    pub cycle: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Solves,
    Incomplete,
    ReachesDeadEnd,
    Cyclic,
}

impl VerificationReport {
    pub fn verdict(&self) -> Verdict {
        if !self.incomplete.is_empty() {
            Verdict::Incomplete
        } else if !self.into_deadends.is_empty() {
            Verdict::ReachesDeadEnd
        } else if self.cycle.is_some() {
            Verdict::Cyclic
        } else {
            Verdict::Solves
        }
    }

    pub fn solves(&self) -> bool {
        self.verdict() == Verdict::Solves
    }
}

fn values(space: &StateSpace, policy: &Policy) -> Vec<Vec<u32>> {
    let view = InstanceView::new(&space.problem);
    space.states.iter().map(|s| policy.features.iter().map(|f| view.feature(f, s)).collect()).collect()
}

fn compatible_edges(space: &StateSpace, policy: &Policy, vals: &[Vec<u32>]) -> Vec<Vec<Transition>> {
    (0..space.num_states() as u32)
        .map(|s| {
            if !space.is_alive(s) {
                return Vec::new();
            }
            space
                .outgoing(s)
                .iter()
                .filter(|t| policy.compatible(&vals[t.src as usize], &vals[t.dst as usize]))
                .copied()
                .collect()
        })
        .collect()
}

/// Checks that the policy solves the instance from every alive state: each
/// has a compatible transition, none leads into a dead-end, and compatible
/// transitions admit no cycle.
pub fn verify_exhaustive(space: &StateSpace, policy: &Policy) -> VerificationReport {
    let vals = values(space, policy);
    let edges = compatible_edges(space, policy, &vals);
    let n = space.num_states();
    let mut report = VerificationReport {
        instance: space.name().to_string(),
        alive: space.num_alive(),
        compatible_transitions: edges.iter().map(Vec::len).sum(),
        incomplete: Vec::new(),
        into_deadends: Vec::new(),
        cycle: None,
    };
    for s in 0..n as u32 {
        if space.is_alive(s) && edges[s as usize].is_empty() {
            report.incomplete.push(s);
        }
        report.into_deadends.extend(edges[s as usize].iter().filter(|t| space.is_deadend(t.dst)));
    }
    report.cycle = find_cycle(n, &edges);
    report
}

// Iterative DFS with colours; returns the states of the first cycle found.
fn find_cycle(n: usize, edges: &[Vec<Transition>]) -> Option<Vec<u32>> {
    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;
    let mut colour = vec![WHITE; n];
    for root in 0..n {
        if colour[root] != WHITE {
            continue;
        }
        let mut stack: Vec<(u32, usize)> = vec![(root as u32, 0)];
        colour[root] = GREY;
        while let Some(&(s, next)) = stack.last() {
            if let Some(t) = edges[s as usize].get(next) {
                stack.last_mut().unwrap().1 += 1;
                match colour[t.dst as usize] {
                    WHITE => {
                        colour[t.dst as usize] = GREY;
                        stack.push((t.dst, 0));
                    }
                    GREY => {
                        let start = stack.iter().position(|&(x, _)| x == t.dst).unwrap();
                        return Some(stack[start..].iter().map(|&(x, _)| x).collect());
                    }
                    _ => {}
                }
            } else {
                colour[s as usize] = BLACK;
                stack.pop();
            }
        }
    }
    None
}

/// True iff every alive state has a compatible transition; otherwise the
/// uncovered states.
pub fn check_complete(space: &StateSpace, policy: &Policy) -> Result<(), Vec<u32>> {
    let vals = values(space, policy);
    let missing: Vec<u32> = (0..space.num_states() as u32)
        .filter(|&s| space.is_alive(s))
        .filter(|&s| !space.outgoing(s).iter().any(|t| policy.compatible(&vals[s as usize], &vals[t.dst as usize])))
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(missing)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Descending {
    Holds,
    /// A compatible transition whose tuple does not strictly decrease.
    Counterexample {
        transition: Transition,
        before: Vec<u32>,
        after: Vec<u32>,
    },
}

/// Checks that every compatible transition from an alive state strictly
/// decreases `tuple` lexicographically.
pub fn check_descending(space: &StateSpace, policy: &Policy, tuple: &dyn Fn(&State) -> Vec<u32>) -> Descending {
    let vals = values(space, policy);
    let tuples: Vec<Vec<u32>> = space.states.iter().map(tuple).collect();
    for s in 0..space.num_states() as u32 {
        if !space.is_alive(s) {
            continue;
        }
        for t in space.outgoing(s) {
            if policy.compatible(&vals[s as usize], &vals[t.dst as usize]) {
                let (before, after) = (&tuples[s as usize], &tuples[t.dst as usize]);
                if after >= before {
                    return Descending::Counterexample { transition: *t, before: before.clone(), after: after.clone() };
                }
            }
        }
    }
    Descending::Holds
}
