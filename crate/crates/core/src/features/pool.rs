use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use super::denot;
use super::expr::{parse_feature, Concept, Feature, FeatureKind, Role};
use super::vocab::{InstanceView, Vocabulary};
use super::FeatureError;
use crate::statespace::SampleSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolConfig {
    pub max_complexity: u32,
    pub max_concepts: usize,
    pub max_features: usize,
    pub distances: bool,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig { max_complexity: 8, max_concepts: 200_000, max_features: 50_000, distances: true }
    }
}

impl PoolConfig {
    pub fn with_complexity(k: u32) -> Self {
        PoolConfig { max_complexity: k, ..Default::default() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PoolStats {
    pub concept_candidates: usize,
    pub concepts: usize,
    pub roles: usize,
    pub feature_candidates: usize,
    pub constant: usize,
    pub duplicate: usize,
}

#[derive(Debug, Clone, Default)]
pub struct FeaturePool {
    pub features: Vec<Feature>,
    pub stats: PoolStats,
}

impl FeaturePool {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// `genplan-pool 1`, then one line per feature: `id weight bool|num expression`.
    pub fn dump(&self) -> String {
        let mut out = String::from("genplan-pool 1\n");
        for (i, f) in self.features.iter().enumerate() {
            writeln!(out, "{i} {} {} {f}", f.weight(), if f.boolean { "bool" } else { "num" }).unwrap();
        }
        out
    }

    pub fn parse_dump(text: &str) -> Result<Self, FeatureError> {
        let mut features = Vec::new();
        let mut header = false;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header {
                if line != "genplan-pool 1" {
                    return Err(FeatureError::Format { line: i + 1, msg: format!("unsupported header '{line}'") });
                }
                header = true;
                continue;
            }
            let err = |msg: String| FeatureError::Format { line: i + 1, msg };
            let mut parts = line.splitn(4, char::is_whitespace);
            let (id, weight, kind, expr) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
                _ => return Err(err("expected 'id weight kind expression'".into())),
            };
            if id.parse::<usize>().ok() != Some(features.len()) {
                return Err(err(format!("feature ids must be consecutive, found '{id}'")));
            }
            let boolean = match kind {
                "bool" => true,
                "num" => false,
                k => return Err(err(format!("unknown feature kind '{k}'"))),
            };
            let f = parse_feature(expr, boolean)?;
            if weight.parse::<u32>().ok() != Some(f.weight()) {
                return Err(err(format!("weight {weight} disagrees with {} for {f}", f.weight())));
            }
            features.push(f);
        }
        if !header {
            return Err(FeatureError::Format { line: 0, msg: "empty pool file".into() });
        }
        Ok(FeaturePool { features, stats: PoolStats::default() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    Up,
    Down,
    Same,
}

/// Qualitative change of one feature across a transition, together with
/// the boolean value at the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChangeValue {
    pub src: bool,
    pub dir: Dir,
}

pub fn change(before: u32, after: u32) -> ChangeValue {
    let dir = match after.cmp(&before) {
        std::cmp::Ordering::Greater => Dir::Up,
        std::cmp::Ordering::Less => Dir::Down,
        std::cmp::Ordering::Equal => Dir::Same,
    };
    ChangeValue { src: before > 0, dir }
}

/// Feature values over all states of a sample, indexed by global state id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureMatrix {
    pub num_states: usize,
    pub values: Vec<Vec<u32>>,
}

impl FeatureMatrix {
    /// Evaluates `features` state by state.
    pub fn evaluate(sample: &SampleSet, features: &[Feature]) -> Self {
        let mut values = vec![Vec::with_capacity(sample.num_states()); features.len()];
        for space in &sample.spaces {
            let view = InstanceView::new(&space.problem);
            for s in &space.states {
                for (f, row) in features.iter().zip(values.iter_mut()) {
                    row.push(view.feature(f, s));
                }
            }
        }
        FeatureMatrix { num_states: sample.num_states(), values }
    }

    pub fn num_features(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, f: usize, s: usize) -> u32 {
        self.values[f][s]
    }

    pub fn boolean(&self, f: usize, s: usize) -> bool {
        self.values[f][s] > 0
    }

    pub fn delta(&self, f: usize, s: usize, t: usize) -> ChangeValue {
        change(self.values[f][s], self.values[f][t])
    }

    /// Matrix restricted to the given features, in that order.
    pub fn select(&self, features: &[usize]) -> Self {
        FeatureMatrix {
            num_states: self.num_states,
            values: features.iter().map(|&f| self.values[f].clone()).collect(),
        }
    }
}

struct SpaceLayout {
    m: usize,
    w: usize,
    states: usize,
    c_off: usize,
    r_off: usize,
}

/// Sample-wide denotations: every state's bitset laid out consecutively.
struct Layout {
    spaces: Vec<SpaceLayout>,
    c_len: usize,
    r_len: usize,
}

impl Layout {
    fn new(sample: &SampleSet) -> Self {
        let (mut c_len, mut r_len) = (0, 0);
        let mut spaces = Vec::new();
        for sp in &sample.spaces {
            let m = sp.problem.objects.len();
            let w = denot::words(m);
            let states = sp.num_states();
            spaces.push(SpaceLayout { m, w, states, c_off: c_len, r_off: r_len });
            c_len += states * w;
            r_len += states * m * w;
        }
        Layout { spaces, c_len, r_len }
    }

    /// Builds a concept vector from a per-state kernel `f(m, w, state, dst)`.
    fn concept(&self, mut f: impl FnMut(&SpaceLayout, usize, usize, &mut [u64])) -> Vec<u64> {
        let mut out = vec![0; self.c_len];
        for (i, sp) in self.spaces.iter().enumerate() {
            for j in 0..sp.states {
                let at = sp.c_off + j * sp.w;
                f(sp, i, j, &mut out[at..at + sp.w]);
            }
        }
        out
    }

    fn role(&self, mut f: impl FnMut(&SpaceLayout, usize, usize, &mut [u64])) -> Vec<u64> {
        let mut out = vec![0; self.r_len];
        for (i, sp) in self.spaces.iter().enumerate() {
            let len = sp.m * sp.w;
            for j in 0..sp.states {
                let at = sp.r_off + j * len;
                f(sp, i, j, &mut out[at..at + len]);
            }
        }
        out
    }

    fn c_slice<'a>(&self, sp: &SpaceLayout, j: usize, c: &'a [u64]) -> &'a [u64] {
        &c[sp.c_off + j * sp.w..sp.c_off + (j + 1) * sp.w]
    }

    fn r_slice<'a>(&self, sp: &SpaceLayout, j: usize, r: &'a [u64]) -> &'a [u64] {
        let len = sp.m * sp.w;
        &r[sp.r_off + j * len..sp.r_off + (j + 1) * len]
    }

    fn counts(&self, c: &[u64]) -> Vec<u32> {
        let mut out = Vec::new();
        for sp in &self.spaces {
            for j in 0..sp.states {
                out.push(denot::count(self.c_slice(sp, j, c)));
            }
        }
        out
    }
}

fn fingerprint<T: Hash>(x: &T) -> u64 {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}

/// Keeps the first of several entries with equal payload.
struct Dedup<T> {
    buckets: HashMap<u64, Vec<usize>>,
    items: Vec<T>,
}

impl<T: Hash + Eq> Dedup<T> {
    fn new() -> Self {
        Dedup { buckets: HashMap::new(), items: Vec::new() }
    }

    /// Index of the new item, or `None` if an equal one is already stored.
    fn insert(&mut self, item: T) -> Option<usize> {
        let bucket = self.buckets.entry(fingerprint(&item)).or_default();
        if bucket.iter().any(|&i| self.items[i] == item) {
            return None;
        }
        bucket.push(self.items.len());
        self.items.push(item);
        Some(self.items.len() - 1)
    }
}

enum Op {
    Prim,
    Not(usize),
    And(usize, usize),
    Exists(usize, usize),
    Forall(usize, usize),
    Equal(String),
}

struct Generator<'a> {
    sample: &'a SampleSet,
    views: Vec<InstanceView>,
    layout: Layout,
    cfg: PoolConfig,
    roles: Vec<(Role, Vec<u64>)>,
    concepts: Vec<(Concept, u32)>,
    dens: Dedup<Vec<u64>>,
    by_weight: Vec<Vec<usize>>,
    stats: PoolStats,
}

impl<'a> Generator<'a> {
    fn primitive_concept(&self, c: &Concept) -> Vec<u64> {
        self.layout.concept(|_, i, j, dst| self.views[i].primitive_concept(c, &self.sample.spaces[i].states[j], dst))
    }

    fn role_denotation(&self, r: &Role) -> Vec<u64> {
        self.layout.role(|sp, i, j, dst| {
            let state = &self.sample.spaces[i].states[j];
            self.views[i].primitive_role(&r.pred, r.goal, state, dst);
            if r.inverse {
                let src = dst.to_vec();
                denot::transpose(sp.m, sp.w, &src, dst);
            }
            if r.plus {
                denot::closure(sp.m, sp.w, dst);
            }
        })
    }

    fn build_roles(&mut self, vocab: &Vocabulary) {
        let mut roles = vocab.roles();
        roles.sort_by_key(|r| (r.complexity(), r.to_string()));
        let mut seen = Dedup::new();
        for r in roles {
            let den = self.role_denotation(&r);
            if seen.insert(den.clone()).is_some() {
                self.roles.push((r, den));
            }
        }
        self.stats.roles = self.roles.len();
    }

    fn denotation(&self, op: &Op, expr: &Concept) -> Vec<u64> {
        let l = &self.layout;
        let den = |i: usize| &self.dens.items[i];
        match *op {
            Op::Prim => self.primitive_concept(expr),
            Op::Not(a) => l.concept(|sp, _, j, dst| denot::not(sp.m, l.c_slice(sp, j, den(a)), dst)),
            Op::And(a, b) => {
                l.concept(|sp, _, j, dst| denot::and(l.c_slice(sp, j, den(a)), l.c_slice(sp, j, den(b)), dst))
            }
            Op::Exists(r, a) => l.concept(|sp, _, j, dst| {
                denot::exists(sp.m, sp.w, l.r_slice(sp, j, &self.roles[r].1), l.c_slice(sp, j, den(a)), dst)
            }),
            Op::Forall(r, a) => l.concept(|sp, _, j, dst| {
                denot::forall(sp.m, sp.w, l.r_slice(sp, j, &self.roles[r].1), l.c_slice(sp, j, den(a)), dst)
            }),
            Op::Equal(ref p) => {
                let r1 = self.role_denotation(&Role::prim(p));
                let r2 = self.role_denotation(&Role::goal(p));
                l.concept(|sp, _, j, dst| denot::equal(sp.m, sp.w, l.r_slice(sp, j, &r1), l.r_slice(sp, j, &r2), dst))
            }
        }
    }

    fn add_layer(&mut self, k: u32, mut candidates: Vec<(Concept, Op)>) -> Result<(), FeatureError> {
        self.stats.concept_candidates += candidates.len();
        let mut keyed: Vec<(String, Concept, Op)> =
            candidates.drain(..).map(|(c, op)| (c.to_string(), c, op)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        let mut layer = Vec::new();
        for (_, c, op) in keyed {
            let den = self.denotation(&op, &c);
            if let Some(i) = self.dens.insert(den) {
                debug_assert_eq!(i, self.concepts.len());
                self.concepts.push((c, k));
                layer.push(i);
                if self.concepts.len() > self.cfg.max_concepts {
                    return Err(FeatureError::PoolCap { what: "concepts", limit: self.cfg.max_concepts });
                }
            }
        }
        self.by_weight.push(layer);
        Ok(())
    }

    fn build_concepts(&mut self, vocab: &Vocabulary) -> Result<(), FeatureError> {
        self.add_layer(0, vec![(Concept::Top, Op::Prim), (Concept::Bot, Op::Prim)])?;
        let k_max = self.cfg.max_complexity;
        for k in 1..=k_max {
            let mut cands: Vec<(Concept, Op)> = Vec::new();
            if k == 1 {
                cands.extend(vocab.primitive_concepts().into_iter().map(|c| (c, Op::Prim)));
            }
            if k == 3 {
                for p in vocab.binary.iter().filter(|p| vocab.goal_binary.contains(p)) {
                    cands.push((Concept::Equal(p.clone()), Op::Equal(p.clone())));
                }
            }
            let k = k as usize;
            for &a in &self.by_weight[k - 1] {
                let c = &self.concepts[a].0;
                if k >= 2 && !matches!(c, Concept::Not(_)) {
                    cands.push((Concept::not(c.clone()), Op::Not(a)));
                }
            }
            for w1 in 1..k {
                let w2 = k - 1 - w1;
                if w2 < w1 {
                    break;
                }
                for (x, &a) in self.by_weight[w1].iter().enumerate() {
                    let start = if w1 == w2 { x + 1 } else { 0 };
                    for &b in &self.by_weight[w2][start..] {
                        let c = Concept::and(self.concepts[a].0.clone(), self.concepts[b].0.clone());
                        cands.push((c, Op::And(a, b)));
                    }
                }
            }
            for (r, (role, _)) in self.roles.iter().enumerate() {
                let wr = role.complexity() as usize;
                if wr + 1 > k {
                    continue;
                }
                for &a in &self.by_weight[k - 1 - wr] {
                    let c = &self.concepts[a].0;
                    cands.push((Concept::exists(role.clone(), c.clone()), Op::Exists(r, a)));
                    cands.push((Concept::forall(role.clone(), c.clone()), Op::Forall(r, a)));
                }
            }
            self.add_layer(k as u32, cands)?;
        }
        self.stats.concepts = self.concepts.len();
        Ok(())
    }

    fn card_values(&self, i: usize) -> Vec<u32> {
        self.layout.counts(&self.dens.items[i])
    }

    fn layers(&self, from: usize, role: usize, restrict: usize) -> Vec<Vec<u32>> {
        let l = &self.layout;
        let mut out = Vec::new();
        for sp in &l.spaces {
            for j in 0..sp.states {
                let mut dist = vec![0; sp.m];
                denot::layers(
                    sp.m,
                    sp.w,
                    l.c_slice(sp, j, &self.dens.items[from]),
                    l.r_slice(sp, j, &self.roles[role].1),
                    l.c_slice(sp, j, &self.dens.items[restrict]),
                    &mut dist,
                );
                out.push(dist);
            }
        }
        out
    }

    fn dist_values(&self, layers: &[Vec<u32>], to: usize) -> Vec<u32> {
        let l = &self.layout;
        let mut out = Vec::with_capacity(layers.len());
        let mut s = 0;
        for sp in &l.spaces {
            for j in 0..sp.states {
                out.push(denot::min_layer(sp.m, &layers[s], l.c_slice(sp, j, &self.dens.items[to])));
                s += 1;
            }
        }
        out
    }

    fn build_features(&mut self, vocab: &Vocabulary) -> Result<(FeaturePool, FeatureMatrix), FeatureError> {
        enum Cand {
            Nullary(String, bool),
            Card(usize),
            Dist(usize, usize, usize, usize),
        }
        let k_max = self.cfg.max_complexity;
        let mut cands: Vec<(u32, String, Feature, Cand)> = Vec::new();
        let mut push = |f: Feature, c: Cand| {
            if f.weight() <= k_max {
                cands.push((f.weight(), f.to_string(), f, c));
            }
        };
        for p in &vocab.nullary {
            push(Feature::nullary(p), Cand::Nullary(p.clone(), false));
        }
        for p in &vocab.goal_nullary {
            let f = Feature { kind: FeatureKind::Nullary { pred: p.clone(), goal: true }, boolean: true };
            push(f, Cand::Nullary(p.clone(), true));
        }
        let mut singletons = Vec::new();
        for (i, (c, w)) in self.concepts.iter().enumerate() {
            if *w > 0 {
                let values = self.card_values(i);
                let boolean = values.iter().all(|&v| v <= 1);
                if values.iter().all(|&v| v == 1) {
                    singletons.push(i);
                }
                push(Feature::card(c.clone(), boolean), Cand::Card(i));
            }
        }
        if self.cfg.distances {
            let top = self.concepts.iter().position(|(c, _)| *c == Concept::Top).expect("Top is registered first");
            let restricts: Vec<usize> =
                std::iter::once(top).chain((0..self.concepts.len()).filter(|&i| self.concepts[i].1 > 0)).collect();
            let targets: Vec<usize> = (0..self.concepts.len()).filter(|&i| self.concepts[i].1 > 0).collect();
            for &from in &singletons {
                for (r, (role, _)) in self.roles.iter().enumerate() {
                    for &c in &restricts {
                        let base = Feature::dist(
                            self.concepts[from].0.clone(),
                            role.clone(),
                            self.concepts[c].0.clone(),
                            Concept::Top,
                        );
                        if base.weight() + 1 > k_max {
                            continue;
                        }
                        for &to in &targets {
                            if base.weight() + self.concepts[to].1 > k_max {
                                continue;
                            }
                            let f = Feature::dist(
                                self.concepts[from].0.clone(),
                                role.clone(),
                                self.concepts[c].0.clone(),
                                self.concepts[to].0.clone(),
                            );
                            push(f, Cand::Dist(from, r, c, to));
                        }
                    }
                }
            }
        }
        cands.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        self.stats.feature_candidates = cands.len();

        let mut layer_cache: HashMap<(usize, usize, usize), Vec<Vec<u32>>> = HashMap::new();
        let mut kept = Dedup::new();
        let mut features = Vec::new();
        for (_, _, f, cand) in cands {
            let values = match cand {
                Cand::Nullary(p, goal) => {
                    let mut v = Vec::new();
                    for (sp, view) in self.sample.spaces.iter().zip(&self.views) {
                        v.extend(sp.states.iter().map(|s| view.nullary(&p, goal, s) as u32));
                    }
                    v
                }
                Cand::Card(i) => self.card_values(i),
                Cand::Dist(from, r, c, to) => {
                    let layers = layer_cache.entry((from, r, c)).or_insert_with(|| self.layers(from, r, c));
                    self.dist_values(layers, to)
                }
            };
            if values.windows(2).all(|p| p[0] == p[1]) {
                self.stats.constant += 1;
                continue;
            }
            if kept.insert(values).is_none() {
                self.stats.duplicate += 1;
                continue;
            }
            features.push(f);
            if features.len() > self.cfg.max_features {
                return Err(FeatureError::PoolCap { what: "features", limit: self.cfg.max_features });
            }
        }
        let matrix = FeatureMatrix { num_states: self.sample.num_states(), values: kept.items };
        Ok((FeaturePool { features, stats: self.stats.clone() }, matrix))
    }
}

/// Enumerates concepts and roles up to the complexity bound, pruning those
/// whose denotation over all sample states repeats an earlier one, and builds
/// the nullary, cardinality and distance features. Constant features and
/// features whose values repeat a cheaper one are dropped. Features come out
/// ordered by weight and print form.
pub fn generate_pool(
    sample: &SampleSet,
    vocab: &Vocabulary,
    cfg: PoolConfig,
) -> Result<(FeaturePool, FeatureMatrix), FeatureError> {
    let mut g = Generator {
        sample,
        views: sample.spaces.iter().map(|sp| InstanceView::new(&sp.problem)).collect(),
        layout: Layout::new(sample),
        cfg,
        roles: Vec::new(),
        concepts: Vec::new(),
        dens: Dedup::new(),
        by_weight: Vec::new(),
        stats: PoolStats::default(),
    };
    g.build_roles(vocab);
    g.build_concepts(vocab)?;
    g.build_features(vocab)
}
