use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fmt::Write as _;

use genplan_maxsat::{Lit, Var, WcnfProblem};

use super::classes::Classes;
use crate::features::FeatureMatrix;
use crate::statespace::SampleSet;

/// Which constraint family a hard clause belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClauseTag {
    /// Some good transition leaves every alive state.
    GoodSuccessor,
    /// Exactly one distance label per solvable state.
    Label,
    /// Good transitions lead to strictly smaller labels.
    Descent,
    /// Selected features tell goals from non-goals.
    GoalSeparation,
    /// Transitions into dead-ends are not good.
    DeadEnd,
    /// Selected features tell good from bad transitions.
    Separation,
}

impl ClauseTag {
    pub fn name(self) -> &'static str {
        match self {
            ClauseTag::GoodSuccessor => "good-successor",
            ClauseTag::Label => "label",
            ClauseTag::Descent => "descent",
            ClauseTag::GoalSeparation => "goal-separation",
            ClauseTag::DeadEnd => "dead-end",
            ClauseTag::Separation => "separation",
        }
    }
}

impl fmt::Display for ClauseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Unordered class pairs, stored with the smaller id first.
pub type PairSet = BTreeSet<(u32, u32)>;

pub fn ordered(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

/// Dense variable numbering: Select(f), then Good(c), then V(s, d).
#[derive(Debug, Clone)]
pub struct VariableMap {
    pub num_features: usize,
    pub num_classes: usize,
    // per global state: first variable and label range
    labels: Vec<Option<(u32, u32, u32)>>,
    pub num_vars: usize,
}

impl VariableMap {
    fn new(sample: &SampleSet, num_features: usize, num_classes: usize, slack: u32) -> Self {
        let mut next = (num_features + num_classes) as u32;
        let mut labels = Vec::with_capacity(sample.num_states());
        for space in &sample.spaces {
            for s in 0..space.num_states() as u32 {
                let range = space.vstar[s as usize].map(|v| (v, v * slack));
                labels.push(range.map(|(lo, hi)| {
                    let first = next;
                    next += hi - lo + 1;
                    (first, lo, hi)
                }));
            }
        }
        VariableMap { num_features, num_classes, labels, num_vars: next as usize }
    }

    pub fn select(&self, f: usize) -> Var {
        Var(f as u32)
    }

    pub fn good(&self, c: u32) -> Var {
        Var(self.num_features as u32 + c)
    }

    /// Allowed labels of a global state; empty for dead-ends.
    pub fn label_range(&self, s: usize) -> std::ops::RangeInclusive<u32> {
        match self.labels[s] {
            Some((_, lo, hi)) => lo..=hi,
            #[allow(clippy::reversed_empty_ranges)]
            None => 1..=0,
        }
    }

    pub fn label(&self, s: usize, d: u32) -> Option<Var> {
        let (first, lo, hi) = self.labels[s]?;
        (lo..=hi).contains(&d).then(|| Var(first + d - lo))
    }
}

#[derive(Debug, Clone)]
pub struct Theory {
    pub problem: WcnfProblem,
    /// Tag of every hard clause, in order.
    pub tags: Vec<ClauseTag>,
    pub vars: VariableMap,
    pub pairs: PairSet,
    /// A goal and a non-goal state (global ids) with equal boolean values on
    /// every pool feature, if any; the theory then holds an empty clause.
    pub indistinguishable: Option<(usize, usize)>,
}

impl Theory {
    fn hard(&mut self, tag: ClauseTag, lits: Vec<Lit>) {
        self.problem.add_hard(lits).expect("theory literals are declared");
        self.tags.push(tag);
    }

    pub fn count(&self, tag: ClauseTag) -> usize {
        self.tags.iter().filter(|&&t| t == tag).count()
    }

    /// Adds separation clauses for pairs not yet enforced; returns how many
    /// pairs were new.
    pub fn add_pairs(&mut self, classes: &Classes, pairs: impl IntoIterator<Item = (u32, u32)>) -> usize {
        let mut added = 0;
        for (a, b) in pairs {
            let p = ordered(a, b);
            if p.0 == p.1 || !self.pairs.insert(p) {
                continue;
            }
            added += 1;
            let (ka, kb) = (&classes.classes[p.0 as usize].key, &classes.classes[p.1 as usize].key);
            let diff: Vec<Lit> = (0..ka.len()).filter(|&f| ka[f] != kb[f]).map(|f| self.vars.select(f).pos()).collect();
            for (x, y) in [(p.0, p.1), (p.1, p.0)] {
                let mut c = vec![self.vars.good(x).neg(), self.vars.good(y).pos()];
                c.extend_from_slice(&diff);
                self.hard(ClauseTag::Separation, c);
            }
        }
        added
    }

    /// One line per hard clause, `index tag`, then `soft` lines for weights.
    pub fn sidecar(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tags.iter().enumerate() {
            writeln!(out, "{i} {t}").unwrap();
        }
        for (j, (_, w)) in self.problem.soft().iter().enumerate() {
            writeln!(out, "{} weight {w}", self.tags.len() + j).unwrap();
        }
        out
    }
}

/// Builds the full theory for `pairs`. `weights[f]` is the cost of feature `f`
/// and `slack` widens the label range of every state to `[V*, slack * V*]`.
pub fn build_theory(
    sample: &SampleSet,
    matrix: &FeatureMatrix,
    weights: &[u32],
    classes: &Classes,
    pairs: &PairSet,
    slack: u32,
) -> Theory {
    assert!(slack >= 1, "slack must be at least 1");
    let vars = VariableMap::new(sample, matrix.num_features(), classes.len(), slack);
    let mut th = Theory {
        problem: WcnfProblem::new(vars.num_vars),
        tags: Vec::new(),
        vars,
        pairs: PairSet::new(),
        indistinguishable: None,
    };

    for (i, space) in sample.spaces.iter().enumerate() {
        let t_off = sample.transition_offset(i);
        for s in 0..space.num_states() as u32 {
            if !space.is_alive(s) {
                continue;
            }
            let mut goods: Vec<Lit> = space
                .outgoing_range(s)
                .filter_map(|k| classes.class_of(t_off + k))
                .map(|c| th.vars.good(c).pos())
                .collect();
            goods.sort();
            goods.dedup();
            th.hard(ClauseTag::GoodSuccessor, goods);
        }
    }

    for s in 0..sample.num_states() {
        let (space, local) = sample.locate_state(s);
        let labels: Vec<Lit> = th.vars.label_range(s).map(|d| th.vars.label(s, d).unwrap().pos()).collect();
        if labels.is_empty() {
            continue;
        }
        if sample.spaces[space].is_goal(local) {
            th.hard(ClauseTag::Label, vec![labels[0]]);
            continue;
        }
        th.hard(ClauseTag::Label, labels.clone());
        for a in 0..labels.len() {
            for b in a + 1..labels.len() {
                th.hard(ClauseTag::Label, vec![!labels[a], !labels[b]]);
            }
        }
    }

    for (i, space) in sample.spaces.iter().enumerate() {
        let t_off = sample.transition_offset(i);
        for (k, t) in space.transitions.iter().enumerate() {
            let Some(c) = classes.class_of(t_off + k) else { continue };
            if space.is_deadend(t.dst) {
                continue;
            }
            let (s, d) = (sample.global_state(i, t.src), sample.global_state(i, t.dst));
            for ds in th.vars.label_range(s) {
                let mut clause = vec![th.vars.good(c).neg(), th.vars.label(s, ds).unwrap().neg()];
                clause
                    .extend(th.vars.label_range(d).filter(|&dd| dd < ds).map(|dd| th.vars.label(d, dd).unwrap().pos()));
                th.hard(ClauseTag::Descent, clause);
            }
        }
    }

    goal_separation(&mut th, sample, matrix);

    for (c, class) in classes.classes.iter().enumerate() {
        if class.deadend_target {
            th.hard(ClauseTag::DeadEnd, vec![th.vars.good(c as u32).neg()]);
        }
    }

    th.add_pairs(classes, pairs.iter().copied());

    for (f, &w) in weights.iter().enumerate() {
        th.problem.add_soft(vec![th.vars.select(f).neg()], w as u64).expect("feature weights are positive");
    }
    th
}

fn signature(matrix: &FeatureMatrix, s: usize) -> Vec<u64> {
    let mut bits = vec![0u64; matrix.num_features().div_ceil(64)];
    for f in 0..matrix.num_features() {
        if matrix.boolean(f, s) {
            bits[f >> 6] |= 1 << (f & 63);
        }
    }
    bits
}

fn goal_separation(th: &mut Theory, sample: &SampleSet, matrix: &FeatureMatrix) {
    let mut goals: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut others: HashMap<Vec<u64>, usize> = HashMap::new();
    for s in 0..sample.num_states() {
        let (space, local) = sample.locate_state(s);
        let table = if sample.spaces[space].is_goal(local) { &mut goals } else { &mut others };
        table.entry(signature(matrix, s)).or_insert(s);
    }
    let mut goals: Vec<(usize, Vec<u64>)> = goals.into_iter().map(|(k, s)| (s, k)).collect();
    let mut others: Vec<(usize, Vec<u64>)> = others.into_iter().map(|(k, s)| (s, k)).collect();
    goals.sort();
    others.sort();

    let mut candidates: Vec<Vec<u64>> = Vec::new();
    for (g, gsig) in &goals {
        for (n, nsig) in &others {
            let diff: Vec<u64> = gsig.iter().zip(nsig).map(|(a, b)| a ^ b).collect();
            if diff.iter().all(|&w| w == 0) {
                th.indistinguishable.get_or_insert((*g, *n));
                th.hard(ClauseTag::GoalSeparation, Vec::new());
                return;
            }
            candidates.push(diff);
        }
    }
    for clause in minimal_sets(candidates) {
        let lits = ones(&clause).map(|f| th.vars.select(f).pos()).collect();
        th.hard(ClauseTag::GoalSeparation, lits);
    }
}

fn ones(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    (0..bits.len() * 64).filter(|&i| bits[i >> 6] >> (i & 63) & 1 == 1)
}

/// Drops duplicates and every set that contains another one. Each kept set
/// is watched on its rarest element, so a candidate only needs to be compared
/// against kept sets watched on one of its own elements.
fn minimal_sets(mut sets: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    sets.sort_by_key(|s| (s.iter().map(|w| w.count_ones()).sum::<u32>(), s.clone()));
    sets.dedup();
    let width = sets.first().map_or(0, |s| s.len() * 64);
    let mut freq = vec![0usize; width];
    for s in &sets {
        for i in ones(s) {
            freq[i] += 1;
        }
    }
    let mut watches: Vec<Vec<usize>> = vec![Vec::new(); width];
    let mut kept: Vec<Vec<u64>> = Vec::new();
    for s in sets {
        let subsumed = ones(&s).any(|i| watches[i].iter().any(|&k| kept[k].iter().zip(&s).all(|(a, b)| a & !b == 0)));
        if subsumed {
            continue;
        }
        if let Some(w) = ones(&s).min_by_key(|&i| freq[i]) {
            watches[w].push(kept.len());
        }
        kept.push(s);
    }
    kept
}
