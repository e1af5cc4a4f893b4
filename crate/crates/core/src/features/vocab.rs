use std::collections::{BTreeSet, HashMap};

use super::denot;
use super::expr::{Concept, Feature, FeatureKind, Role};
use super::FeatureError;
use crate::strips::{GroundProblem, State, OBJECT_TYPE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VocabularyOptions {
    /// Type names become primitive concepts.
    pub types: bool,
    /// Silently skip predicates of arity above two instead of failing.
    pub ignore_high_arity: bool,
}

impl Default for VocabularyOptions {
    fn default() -> Self {
        VocabularyOptions { types: true, ignore_high_arity: false }
    }
}

/// Primitive symbols of the description-logic grammar.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub nullary: Vec<String>,
    pub unary: Vec<String>,
    pub binary: Vec<String>,
    pub goal_nullary: Vec<String>,
    pub goal_unary: Vec<String>,
    pub goal_binary: Vec<String>,
    pub types: Vec<String>,
    pub nominals: Vec<String>,
}

impl Vocabulary {
    /// Symbols shared by a set of grounded instances of one domain. Goal
    /// versions exist for every predicate used in some goal; nominals for
    /// constants and declared goal parameters.
    pub fn new<'a>(
        problems: impl IntoIterator<Item = &'a GroundProblem>,
        opts: VocabularyOptions,
    ) -> Result<Self, FeatureError> {
        let mut preds: BTreeSet<(String, usize)> = BTreeSet::new();
        let mut goal_preds = BTreeSet::new();
        let mut types = BTreeSet::new();
        let mut nominals = BTreeSet::new();
        for gp in problems {
            preds.extend(gp.predicates.iter().map(|p| (p.name.clone(), p.arity)));
            goal_preds.extend(gp.goal_facts.iter().map(|f| f.predicate.clone()));
            if opts.types {
                types.extend(gp.type_members.keys().filter(|t| *t != OBJECT_TYPE).cloned());
            }
            nominals.extend(gp.constants.iter().map(|&o| gp.objects[o as usize].clone()));
            nominals.extend(gp.goal_parameters.iter().map(|(n, _)| n.clone()));
        }
        let mut v = Vocabulary {
            types: types.into_iter().collect(),
            nominals: nominals.into_iter().collect(),
            ..Default::default()
        };
        for (name, arity) in preds {
            let goal = goal_preds.contains(&name);
            let (list, glist) = match arity {
                0 => (&mut v.nullary, &mut v.goal_nullary),
                1 => (&mut v.unary, &mut v.goal_unary),
                2 => (&mut v.binary, &mut v.goal_binary),
                _ if opts.ignore_high_arity => continue,
                _ => return Err(FeatureError::HighArity { predicate: name, arity }),
            };
            if goal {
                glist.push(name.clone());
            }
            list.push(name);
        }
        Ok(v)
    }

    /// Fails on the first predicate, type or nominal of `f` that this
    /// vocabulary lacks, or on a predicate used with the wrong arity.
    pub fn check_feature(&self, f: &Feature) -> Result<(), FeatureError> {
        let unknown = |symbol: String| FeatureError::UnknownSymbol { feature: f.to_string(), symbol };
        let has = |list: &[String], p: &str| list.iter().any(|x| x == p);
        let role = |r: &Role| if has(&self.binary, &r.pred) { Ok(()) } else { Err(unknown(r.pred.clone())) };
        fn concept(
            v: &Vocabulary,
            c: &Concept,
            role: &dyn Fn(&Role) -> Result<(), FeatureError>,
            unknown: &dyn Fn(String) -> FeatureError,
        ) -> Result<(), FeatureError> {
            let has = |list: &[String], p: &str| list.iter().any(|x| x == p);
            match c {
                Concept::Top | Concept::Bot => Ok(()),
                Concept::Prim { pred, .. } if has(&v.unary, pred) => Ok(()),
                Concept::Type(t) if has(&v.types, t) || t == OBJECT_TYPE => Ok(()),
                Concept::Nominal(n) if has(&v.nominals, n) => Ok(()),
                Concept::Prim { pred: s, .. } | Concept::Type(s) | Concept::Nominal(s) => Err(unknown(s.clone())),
                Concept::Not(x) => concept(v, x, role, unknown),
                Concept::And(a, b) => concept(v, a, role, unknown).and_then(|_| concept(v, b, role, unknown)),
                Concept::Exists(r, x) | Concept::Forall(r, x) => role(r).and_then(|_| concept(v, x, role, unknown)),
                Concept::Equal(p) => role(&Role::prim(p)),
            }
        }
        match &f.kind {
            FeatureKind::Nullary { pred, .. } if has(&self.nullary, pred) => Ok(()),
            FeatureKind::Nullary { pred, .. } => Err(unknown(pred.clone())),
            FeatureKind::Card(c) => concept(self, c, &role, &unknown),
            FeatureKind::Dist { from, role: r, restrict, to } => {
                role(r)?;
                for c in [from, restrict, to] {
                    concept(self, c, &role, &unknown)?;
                }
                Ok(())
            }
        }
    }

    pub fn primitive_concepts(&self) -> Vec<Concept> {
        let mut out: Vec<Concept> = self.unary.iter().map(|p| Concept::prim(p)).collect();
        out.extend(self.goal_unary.iter().map(|p| Concept::goal(p)));
        out.extend(self.types.iter().map(|t| Concept::Type(t.clone())));
        out.extend(self.nominals.iter().map(|n| Concept::nominal(n)));
        out
    }

    /// Primitive roles, goal roles, and their inverses and closures.
    pub fn roles(&self) -> Vec<Role> {
        let base = self.binary.iter().map(|p| Role::prim(p)).chain(self.goal_binary.iter().map(|p| Role::goal(p)));
        base.flat_map(|r| [r.clone(), r.clone().inv(), r.clone().closure(), r.inv().closure()]).collect()
    }
}

/// Per-instance tables for evaluating expressions on its states.
#[derive(Debug, Clone)]
pub struct InstanceView {
    pub m: usize,
    pub w: usize,
    nullary: HashMap<String, u32>,
    unary: HashMap<String, Vec<(u32, u32)>>,
    binary: HashMap<String, Vec<(u32, u32, u32)>>,
    goal_nullary: Vec<String>,
    goal_unary: HashMap<String, Vec<u64>>,
    goal_binary: HashMap<String, Vec<u64>>,
    types: HashMap<String, Vec<u64>>,
    nominals: HashMap<String, u32>,
}

impl InstanceView {
    pub fn new(gp: &GroundProblem) -> Self {
        let m = gp.objects.len();
        let w = denot::words(m);
        let mut view = InstanceView {
            m,
            w,
            nullary: HashMap::new(),
            unary: HashMap::new(),
            binary: HashMap::new(),
            goal_nullary: Vec::new(),
            goal_unary: HashMap::new(),
            goal_binary: HashMap::new(),
            types: HashMap::new(),
            nominals: HashMap::new(),
        };
        for (id, atom) in gp.atoms.iter().enumerate() {
            let name = gp.predicates[atom.predicate as usize].name.clone();
            let id = id as u32;
            match atom.args[..] {
                [] => {
                    view.nullary.insert(name, id);
                }
                [a] => view.unary.entry(name).or_default().push((id, a)),
                [a, b] => view.binary.entry(name).or_default().push((id, a, b)),
                _ => {}
            }
        }
        for &g in &gp.goal {
            let atom = &gp.atoms[g as usize];
            let name = gp.predicates[atom.predicate as usize].name.clone();
            match atom.args[..] {
                [] => view.goal_nullary.push(name),
                [a] => denot::set(view.goal_unary.entry(name).or_insert_with(|| vec![0; w]), a as usize),
                [a, b] => {
                    let row = view.goal_binary.entry(name).or_insert_with(|| vec![0; m * w]);
                    denot::set(&mut row[a as usize * w..(a as usize + 1) * w], b as usize);
                }
                _ => {}
            }
        }
        for (t, members) in &gp.type_members {
            let mut bits = vec![0; w];
            for &o in members {
                denot::set(&mut bits, o as usize);
            }
            view.types.insert(t.clone(), bits);
        }
        for &c in &gp.constants {
            view.nominals.insert(gp.objects[c as usize].clone(), c);
        }
        for (name, o) in &gp.goal_parameters {
            view.nominals.insert(name.clone(), *o);
        }
        view
    }

    pub fn nullary(&self, pred: &str, goal: bool, s: &State) -> bool {
        if goal {
            self.goal_nullary.iter().any(|p| p == pred)
        } else {
            self.nullary.get(pred).is_some_and(|&a| s.contains(a))
        }
    }

    pub fn primitive_concept(&self, c: &Concept, s: &State, dst: &mut [u64]) {
        dst.fill(0);
        match c {
            Concept::Top => denot::fill(self.m, dst),
            Concept::Bot => {}
            Concept::Prim { pred, goal: false } => {
                for &(atom, o) in self.unary.get(pred).into_iter().flatten() {
                    if s.contains(atom) {
                        denot::set(dst, o as usize);
                    }
                }
            }
            Concept::Prim { pred, goal: true } => {
                if let Some(bits) = self.goal_unary.get(pred) {
                    dst.copy_from_slice(bits);
                }
            }
            Concept::Type(t) => {
                if let Some(bits) = self.types.get(t) {
                    dst.copy_from_slice(bits);
                }
            }
            Concept::Nominal(n) => {
                if let Some(&o) = self.nominals.get(n) {
                    denot::set(dst, o as usize);
                }
            }
            _ => panic!("{c} is not a primitive concept"),
        }
    }

    /// Denotation of a plain (non-inverted, non-closed) role.
    pub fn primitive_role(&self, pred: &str, goal: bool, s: &State, dst: &mut [u64]) {
        let w = self.w;
        dst.fill(0);
        if goal {
            if let Some(bits) = self.goal_binary.get(pred) {
                dst.copy_from_slice(bits);
            }
            return;
        }
        for &(atom, a, b) in self.binary.get(pred).into_iter().flatten() {
            if s.contains(atom) {
                denot::set(&mut dst[a as usize * w..(a as usize + 1) * w], b as usize);
            }
        }
    }

    pub fn role(&self, r: &Role, s: &State) -> Vec<u64> {
        let (m, w) = (self.m, self.w);
        let mut base = vec![0; m * w];
        self.primitive_role(&r.pred, r.goal, s, &mut base);
        if r.inverse {
            let mut t = vec![0; m * w];
            denot::transpose(m, w, &base, &mut t);
            base = t;
        }
        if r.plus {
            denot::closure(m, w, &mut base);
        }
        base
    }

    pub fn concept(&self, c: &Concept, s: &State) -> Vec<u64> {
        let (m, w) = (self.m, self.w);
        let mut out = vec![0; w];
        match c {
            Concept::Not(x) => denot::not(m, &self.concept(x, s), &mut out),
            Concept::And(a, b) => denot::and(&self.concept(a, s), &self.concept(b, s), &mut out),
            Concept::Exists(r, x) => denot::exists(m, w, &self.role(r, s), &self.concept(x, s), &mut out),
            Concept::Forall(r, x) => denot::forall(m, w, &self.role(r, s), &self.concept(x, s), &mut out),
            Concept::Equal(p) => {
                denot::equal(m, w, &self.role(&Role::prim(p), s), &self.role(&Role::goal(p), s), &mut out)
            }
            prim => self.primitive_concept(prim, s, &mut out),
        }
        out
    }

    /// Feature value on one state. Boolean cardinality features are true
    /// exactly when the concept denotes a single object; distances take the
    /// minimum over all start objects.
    pub fn feature(&self, f: &Feature, s: &State) -> u32 {
        match &f.kind {
            FeatureKind::Nullary { pred, goal } => self.nullary(pred, *goal, s) as u32,
            FeatureKind::Card(c) => {
                let n = denot::count(&self.concept(c, s));
                if f.boolean {
                    (n == 1) as u32
                } else {
                    n
                }
            }
            FeatureKind::Dist { from, role, restrict, to } => {
                let mut dist = vec![0; self.m];
                denot::layers(
                    self.m,
                    self.w,
                    &self.concept(from, s),
                    &self.role(role, s),
                    &self.concept(restrict, s),
                    &mut dist,
                );
                denot::min_layer(self.m, &dist, &self.concept(to, s))
            }
        }
    }
}
