//! Reachable state spaces with goal distances.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::strips::{Fact, GroundProblem, State};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StateSpaceError {
    #[error("{instance}: more than {limit} {what}")]
    Limit { instance: String, what: &'static str, limit: usize },
    #[error("state dump line {line}: {msg}")]
    Format { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpandLimits {
    pub max_states: usize,
    pub max_transitions: usize,
}

impl Default for ExpandLimits {
    fn default() -> Self {
        ExpandLimits { max_states: 1_000_000, max_transitions: 10_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub src: u32,
    pub dst: u32,
    pub action: u32,
}

/// The reachable part of one instance. State 0 is the initial state and
/// transitions are grouped by source state.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub problem: Arc<GroundProblem>,
    pub states: Vec<State>,
    pub transitions: Vec<Transition>,
    out_start: Vec<u32>,
    pub goal: Vec<bool>,
    /// Shortest distance to a goal; `None` for dead-ends.
    pub vstar: Vec<Option<u32>>,
}

impl StateSpace {
    fn from_parts(problem: Arc<GroundProblem>, states: Vec<State>, mut transitions: Vec<Transition>) -> Self {
        transitions.sort_by_key(|t| (t.src, t.action));
        let mut out_start = vec![0u32; states.len() + 1];
        for t in &transitions {
            out_start[t.src as usize + 1] += 1;
        }
        for i in 0..states.len() {
            out_start[i + 1] += out_start[i];
        }
        let goal = states.iter().map(|s| problem.is_goal(s)).collect();
        let mut space = StateSpace { problem, vstar: vec![None; states.len()], states, transitions, out_start, goal };
        space.compute_vstar();
        space
    }

    pub fn name(&self) -> &str {
        &self.problem.name
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn initial(&self) -> u32 {
        0
    }

    /// Outgoing transitions of `s`, in action order.
    pub fn outgoing(&self, s: u32) -> &[Transition] {
        &self.transitions[self.out_start[s as usize] as usize..self.out_start[s as usize + 1] as usize]
    }

    /// Index range of the outgoing transitions of `s` in [`Self::transitions`].
    pub fn outgoing_range(&self, s: u32) -> std::ops::Range<usize> {
        self.out_start[s as usize] as usize..self.out_start[s as usize + 1] as usize
    }

    pub fn is_goal(&self, s: u32) -> bool {
        self.goal[s as usize]
    }

    pub fn is_deadend(&self, s: u32) -> bool {
        self.vstar[s as usize].is_none()
    }

    /// Solvable and not a goal.
    pub fn is_alive(&self, s: u32) -> bool {
        !self.is_goal(s) && !self.is_deadend(s)
    }

    /// Transitions whose source is not a goal state.
    pub fn num_nongoal_transitions(&self) -> usize {
        self.transitions.iter().filter(|t| !self.is_goal(t.src)).count()
    }

    pub fn num_alive(&self) -> usize {
        (0..self.num_states() as u32).filter(|&s| self.is_alive(s)).count()
    }

    /// Largest finite goal distance.
    pub fn diameter(&self) -> u32 {
        self.vstar.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Recomputes goal distances by backward breadth-first search from all goals.
    pub fn compute_vstar(&mut self) {
        let n = self.states.len();
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
        for t in &self.transitions {
            preds[t.dst as usize].push(t.src);
        }
        let mut vstar = vec![None; n];
        let mut queue = VecDeque::new();
        for (s, d) in vstar.iter_mut().enumerate() {
            if self.goal[s] {
                *d = Some(0);
                queue.push_back(s as u32);
            }
        }
        while let Some(s) = queue.pop_front() {
            let d = vstar[s as usize].unwrap();
            for &p in &preds[s as usize] {
                if vstar[p as usize].is_none() {
                    vstar[p as usize] = Some(d + 1);
                    queue.push_back(p);
                }
            }
        }
        self.vstar = vstar;
    }

    /// Text dump: a header, one `s` line per state and one `t` line per
    /// transition. See [`StateSpace::read_dump`].
    pub fn write_dump(&self) -> String {
        let v = |s: u32| self.vstar[s as usize].map_or("-".to_string(), |d| d.to_string());
        let flag = |b: bool| if b { '1' } else { '0' };
        let mut out = String::new();
        writeln!(out, "genplan-statespace 1").unwrap();
        writeln!(out, "instance {} states {} transitions {}", self.name(), self.num_states(), self.num_transitions())
            .unwrap();
        for (i, s) in self.states.iter().enumerate() {
            let i = i as u32;
            write!(out, "s {i} {} {} {}", flag(self.is_goal(i)), flag(self.is_deadend(i)), v(i)).unwrap();
            for a in s.atoms() {
                write!(out, " {}", self.problem.atom_fact(a)).unwrap();
            }
            out.push('\n');
        }
        for t in &self.transitions {
            writeln!(
                out,
                "t {} {} {} {}{} {}{} {}",
                t.src,
                t.dst,
                self.problem.action_name(t.action),
                flag(self.is_goal(t.src)),
                flag(self.is_goal(t.dst)),
                flag(self.is_deadend(t.src)),
                flag(self.is_deadend(t.dst)),
                v(t.src)
            )
            .unwrap();
        }
        out
    }

    /// Reads a dump written by [`StateSpace::write_dump`] for the same
    /// grounded problem. Labels are recomputed and checked against the file.
    pub fn read_dump(text: &str, problem: Arc<GroundProblem>) -> Result<Self, StateSpaceError> {
        let action_ids: HashMap<String, u32> =
            (0..problem.actions.len() as u32).map(|a| (problem.action_name(a), a)).collect();
        let mut lines = text.lines().enumerate();
        let err = |line: usize, msg: String| StateSpaceError::Format { line: line + 1, msg };
        match lines.next() {
            Some((_, "genplan-statespace 1")) => {}
            Some((i, l)) => return Err(err(i, format!("unsupported header '{l}'"))),
            None => return Err(err(0, "empty dump".into())),
        }
        let mut states = Vec::new();
        let mut transitions = Vec::new();
        let mut labels = Vec::new();
        let mut expected = (0usize, 0usize);
        for (i, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.first().copied() {
                Some("instance") => {
                    if f.len() != 6 || f[1] != problem.name {
                        return Err(err(i, format!("dump is not for instance '{}'", problem.name)));
                    }
                    let num = |s: &str| s.parse::<usize>().map_err(|_| err(i, format!("bad count '{s}'")));
                    expected = (num(f[3])?, num(f[5])?);
                }
                Some("s") => {
                    if f.len() < 5 || f[1].parse::<usize>().ok() != Some(states.len()) {
                        return Err(err(i, "malformed or out-of-order state line".into()));
                    }
                    let facts = f[5..].iter().map(|a| parse_fact(a).ok_or_else(|| err(i, format!("bad atom '{a}'"))));
                    let facts = facts.collect::<Result<Vec<_>, _>>()?;
                    let state = problem.state_from_facts(&facts).map_err(|e| err(i, e.to_string()))?;
                    states.push(state);
                    labels.push((f[2] == "1", f[4].parse::<u32>().ok()));
                }
                Some("t") => {
                    if f.len() != 7 {
                        return Err(err(i, "malformed transition line".into()));
                    }
                    let id = |s: &str| s.parse::<u32>().map_err(|_| err(i, format!("bad state id '{s}'")));
                    let (src, dst) = (id(f[1])?, id(f[2])?);
                    if src as usize >= states.len() || dst as usize >= states.len() {
                        return Err(err(i, "transition refers to an unknown state".into()));
                    }
                    let action = *action_ids.get(f[3]).ok_or_else(|| err(i, format!("unknown action '{}'", f[3])))?;
                    let from = &states[src as usize];
                    if !problem.is_applicable(from, action) || problem.apply(from, action) != states[dst as usize] {
                        return Err(err(i, format!("{} does not lead from state {src} to {dst}", f[3])));
                    }
                    transitions.push(Transition { src, dst, action });
                }
                None => {}
                Some(other) => return Err(err(i, format!("unknown record '{other}'"))),
            }
        }
        if expected != (states.len(), transitions.len()) {
            return Err(err(
                0,
                format!(
                    "header announces {expected:?} states/transitions, found ({}, {})",
                    states.len(),
                    transitions.len()
                ),
            ));
        }
        let space = StateSpace::from_parts(problem, states, transitions);
        for (s, &(goal, vstar)) in labels.iter().enumerate() {
            if space.goal[s] != goal || space.vstar[s] != vstar {
                return Err(err(0, format!("labels of state {s} disagree with the recomputed ones")));
            }
        }
        Ok(space)
    }
}

fn parse_fact(text: &str) -> Option<Fact> {
    let (pred, rest) = text.split_once('(')?;
    let args = rest.strip_suffix(')')?;
    let args = if args.is_empty() { Vec::new() } else { args.split(',').map(str::to_string).collect() };
    Some(Fact { predicate: pred.to_string(), args })
}

/// Breadth-first expansion of all states reachable from the initial state,
/// followed by goal-distance labelling.
pub fn expand(problem: Arc<GroundProblem>, limits: ExpandLimits) -> Result<StateSpace, StateSpaceError> {
    let mut index: HashMap<State, u32> = HashMap::new();
    let mut states = vec![problem.init.clone()];
    index.insert(problem.init.clone(), 0);
    let mut transitions = Vec::new();
    let mut next = 0usize;
    while next < states.len() {
        let src = next as u32;
        for (action, succ) in problem.successors(&states[next]) {
            let dst = match index.get(&succ) {
                Some(&d) => d,
                None => {
                    let d = states.len() as u32;
                    if states.len() >= limits.max_states {
                        return Err(StateSpaceError::Limit {
                            instance: problem.name.clone(),
                            what: "states",
                            limit: limits.max_states,
                        });
                    }
                    index.insert(succ.clone(), d);
                    states.push(succ);
                    d
                }
            };
            transitions.push(Transition { src, dst, action });
            if transitions.len() > limits.max_transitions {
                return Err(StateSpaceError::Limit {
                    instance: problem.name.clone(),
                    what: "transitions",
                    limit: limits.max_transitions,
                });
            }
        }
        next += 1;
    }
    let space = StateSpace::from_parts(problem, states, transitions);
    if space.is_deadend(0) {
        log::warn!("{}: the initial state is a dead-end", space.name());
    }
    Ok(space)
}

/// Several state spaces with global, contiguous state and transition ids.
#[derive(Debug, Clone, Default)]
pub struct SampleSet {
    pub spaces: Vec<StateSpace>,
    state_offset: Vec<usize>,
    transition_offset: Vec<usize>,
}

impl SampleSet {
    pub fn new(spaces: Vec<StateSpace>) -> Self {
        let mut state_offset = vec![0];
        let mut transition_offset = vec![0];
        for s in &spaces {
            state_offset.push(state_offset.last().unwrap() + s.num_states());
            transition_offset.push(transition_offset.last().unwrap() + s.num_transitions());
        }
        SampleSet { spaces, state_offset, transition_offset }
    }

    pub fn num_states(&self) -> usize {
        *self.state_offset.last().unwrap()
    }

    pub fn num_transitions(&self) -> usize {
        *self.transition_offset.last().unwrap()
    }

    pub fn state_offset(&self, space: usize) -> usize {
        self.state_offset[space]
    }

    pub fn transition_offset(&self, space: usize) -> usize {
        self.transition_offset[space]
    }

    pub fn global_state(&self, space: usize, local: u32) -> usize {
        self.state_offset[space] + local as usize
    }

    /// Space index and local id of a global state id.
    pub fn locate_state(&self, global: usize) -> (usize, u32) {
        let space = self.state_offset.partition_point(|&o| o <= global) - 1;
        (space, (global - self.state_offset[space]) as u32)
    }

    /// Space index and the transition of a global transition id.
    pub fn transition(&self, global: usize) -> (usize, Transition) {
        let space = self.transition_offset.partition_point(|&o| o <= global) - 1;
        (space, self.spaces[space].transitions[global - self.transition_offset[space]])
    }

    pub fn diameter(&self) -> u32 {
        self.spaces.iter().map(StateSpace::diameter).max().unwrap_or(0)
    }

    pub fn num_nongoal_transitions(&self) -> usize {
        self.spaces.iter().map(StateSpace::num_nongoal_transitions).sum()
    }
}
