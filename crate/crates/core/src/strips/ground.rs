//! Grounding of lifted models into propositional STRIPS problems.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use super::model::*;
use super::state::State;
use super::PddlError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateInfo {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: u32,
    pub args: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub schema: u32,
    pub args: Vec<u32>,
    pub pre: Vec<u32>,
    pub add: Vec<u32>,
    pub del: Vec<u32>,
}

#[derive(Debug, Clone, Copy)]
pub struct GroundingLimits {
    pub max_actions: usize,
}

impl Default for GroundingLimits {
    fn default() -> Self {
        GroundingLimits { max_actions: 5_000_000 }
    }
}

/// A grounded instance. Objects, predicates, atoms and actions are each
/// sorted by name, so ids are deterministic.
#[derive(Debug, Clone)]
pub struct GroundProblem {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<String>,
    pub object_types: Vec<String>,
    /// Members of each declared type, including those of its subtypes.
    pub type_members: BTreeMap<String, Vec<u32>>,
    pub predicates: Vec<PredicateInfo>,
    pub atoms: Vec<GroundAtom>,
    atom_index: HashMap<GroundAtom, u32>,
    pub schema_names: Vec<String>,
    pub actions: Vec<GroundAction>,
    pub init: State,
    pub goal: Vec<u32>,
    pub goal_facts: Vec<Fact>,
    pub goal_parameters: Vec<(String, u32)>,
    pub constants: Vec<u32>,
}

impl GroundProblem {
    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn object_id(&self, name: &str) -> Option<u32> {
        self.objects.binary_search_by(|o| o.as_str().cmp(name)).ok().map(|i| i as u32)
    }

    pub fn predicate_id(&self, name: &str) -> Option<u32> {
        self.predicates.binary_search_by(|p| p.name.as_str().cmp(name)).ok().map(|i| i as u32)
    }

    pub fn atom_id(&self, atom: &GroundAtom) -> Option<u32> {
        self.atom_index.get(atom).copied()
    }

    pub fn fact_id(&self, fact: &Fact) -> Option<u32> {
        let predicate = self.predicate_id(&fact.predicate)?;
        let args = fact.args.iter().map(|a| self.object_id(a)).collect::<Option<Vec<_>>>()?;
        self.atom_id(&GroundAtom { predicate, args })
    }

    pub fn atom_fact(&self, id: u32) -> Fact {
        let a = &self.atoms[id as usize];
        Fact {
            predicate: self.predicates[a.predicate as usize].name.clone(),
            args: a.args.iter().map(|&o| self.objects[o as usize].clone()).collect(),
        }
    }

    pub fn action_name(&self, id: u32) -> String {
        let a = &self.actions[id as usize];
        let args: Vec<&str> = a.args.iter().map(|&o| self.objects[o as usize].as_str()).collect();
        format!("{}({})", self.schema_names[a.schema as usize], args.join(","))
    }

    pub fn state_from_facts<'a>(&self, facts: impl IntoIterator<Item = &'a Fact>) -> Result<State, PddlError> {
        let mut s = State::empty(self.num_atoms());
        for f in facts {
            let id = self.fact_id(f).ok_or_else(|| PddlError::semantic(format!("unknown atom '{f}'")))?;
            s.insert(id);
        }
        Ok(s)
    }

    pub fn state_facts(&self, s: &State) -> Vec<Fact> {
        s.atoms().map(|a| self.atom_fact(a)).collect()
    }

    pub fn is_goal(&self, s: &State) -> bool {
        s.contains_all(&self.goal)
    }

    pub fn is_applicable(&self, s: &State, action: u32) -> bool {
        s.contains_all(&self.actions[action as usize].pre)
    }

    pub fn apply(&self, s: &State, action: u32) -> State {
        let a = &self.actions[action as usize];
        let mut next = s.clone();
        for &d in &a.del {
            next.remove(d);
        }
        for &p in &a.add {
            next.insert(p);
        }
        next
    }

    /// Applicable actions and their successor states, in action-id order.
    pub fn successors(&self, s: &State) -> Vec<(u32, State)> {
        (0..self.actions.len() as u32).filter(|&a| self.is_applicable(s, a)).map(|a| (a, self.apply(s, a))).collect()
    }
}

impl fmt::Display for GroundProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} objects, {} atoms, {} actions",
            self.name,
            self.objects.len(),
            self.atoms.len(),
            self.actions.len()
        )
    }
}

/// Grounds `inst`. Ground actions are all type-consistent bindings of each
/// schema whose preconditions on static predicates hold initially; bindings
/// that fail a static precondition can never fire.
pub fn ground(dom: &DomainModel, inst: &InstanceModel) -> Result<GroundProblem, PddlError> {
    ground_with_limits(dom, inst, GroundingLimits::default())
}

pub fn ground_with_limits(
    dom: &DomainModel,
    inst: &InstanceModel,
    limits: GroundingLimits,
) -> Result<GroundProblem, PddlError> {
    super::parse::validate_instance(inst, dom)?;
    let mut named: Vec<(String, String)> =
        inst.objects.iter().chain(&dom.constants).map(|o| (o.name.clone(), o.ty.clone())).collect();
    named.sort();
    let objects: Vec<String> = named.iter().map(|(n, _)| n.clone()).collect();
    let object_types: Vec<String> = named.iter().map(|(_, t)| t.clone()).collect();
    let obj_id = |name: &str| objects.binary_search_by(|o| o.as_str().cmp(name)).ok().map(|i| i as u32);

    let mut type_members: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    for t in dom.type_names() {
        let members = (0..objects.len() as u32).filter(|&o| dom.is_subtype(&object_types[o as usize], t)).collect();
        type_members.insert(t.to_string(), members);
    }
    let of_type = |ty: &str| -> Vec<u32> {
        if ty == OBJECT_TYPE {
            (0..objects.len() as u32).collect()
        } else {
            type_members.get(ty).cloned().unwrap_or_default()
        }
    };

    let mut preds: Vec<&PredicateDecl> = dom.predicates.iter().collect();
    preds.sort_by(|a, b| a.name.cmp(&b.name));
    let predicates: Vec<PredicateInfo> =
        preds.iter().map(|p| PredicateInfo { name: p.name.clone(), arity: p.arity() }).collect();
    let pred_id = |name: &str| predicates.binary_search_by(|p| p.name.as_str().cmp(name)).unwrap() as u32;

    // all type-consistent atoms, in (predicate, args) order
    let mut atoms = Vec::new();
    for (pi, p) in preds.iter().enumerate() {
        let domains: Vec<Vec<u32>> = p.params.iter().map(|prm| of_type(&prm.ty)).collect();
        for args in cartesian(&domains) {
            atoms.push(GroundAtom { predicate: pi as u32, args });
        }
    }
    let atom_index: HashMap<GroundAtom, u32> = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i as u32)).collect();

    let resolve = |f: &Fact| -> Result<u32, PddlError> {
        let args = f
            .args
            .iter()
            .map(|a| obj_id(a).ok_or_else(|| PddlError::semantic(format!("undeclared object '{a}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        atom_index
            .get(&GroundAtom { predicate: pred_id(&f.predicate), args })
            .copied()
            .ok_or_else(|| PddlError::semantic(format!("atom '{f}' is not type-consistent")))
    };
    let init = State::from_atoms(atoms.len(), inst.init.iter().map(resolve).collect::<Result<Vec<_>, _>>()?);
    let goal: Vec<u32> = inst.goal.iter().map(resolve).collect::<Result<Vec<_>, _>>()?;

    let statics: HashSet<&str> = dom.static_predicates().into_iter().collect();
    let mut schemas: Vec<&ActionSchema> = dom.actions.iter().collect();
    schemas.sort_by(|a, b| a.name.cmp(&b.name));
    let mut actions = Vec::new();
    for (si, schema) in schemas.iter().enumerate() {
        let domains: Vec<Vec<u32>> = schema.params.iter().map(|p| of_type(&p.ty)).collect();
        let var_index: HashMap<&str, usize> =
            schema.params.iter().enumerate().map(|(i, p)| (p.name.as_str(), i)).collect();
        // static preconditions, checked as soon as their last variable is bound
        let mut static_checks: Vec<Vec<&SchemaAtom>> = vec![Vec::new(); schema.params.len() + 1];
        for a in schema.pre.iter().filter(|a| statics.contains(a.predicate.as_str())) {
            let last = a
                .args
                .iter()
                .filter_map(|t| match t {
                    Term::Var(v) => Some(var_index[v.as_str()] + 1),
                    Term::Const(_) => None,
                })
                .max()
                .unwrap_or(0);
            static_checks[last].push(a);
        }
        let instantiate = |a: &SchemaAtom, binding: &[u32]| -> Option<u32> {
            let args = a
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => Some(binding[var_index[v.as_str()]]),
                    Term::Const(c) => obj_id(c),
                })
                .collect::<Option<Vec<_>>>()?;
            atom_index.get(&GroundAtom { predicate: pred_id(&a.predicate), args }).copied()
        };
        let holds = |a: &SchemaAtom, binding: &[u32]| instantiate(a, binding).is_some_and(|id| init.contains(id));
        if !static_checks[0].iter().all(|a| holds(a, &[])) {
            continue;
        }
        let mut binding: Vec<u32> = Vec::with_capacity(schema.params.len());
        let mut stack: Vec<usize> = vec![0];
        // iterative depth-first enumeration of bindings
        while let Some(&pos) = stack.last() {
            let depth = stack.len() - 1;
            if depth == schema.params.len() {
                let inst_all = |atoms: &[SchemaAtom]| -> Option<Vec<u32>> {
                    let mut v = atoms.iter().map(|a| instantiate(a, &binding)).collect::<Option<Vec<_>>>()?;
                    v.sort_unstable();
                    v.dedup();
                    Some(v)
                };
                // a binding whose atoms are not type-consistent can never apply
                if let (Some(pre), Some(add), Some(mut del)) =
                    (inst_all(&schema.pre), inst_all(&schema.add), inst_all(&schema.del))
                {
                    del.retain(|d| add.binary_search(d).is_err());
                    actions.push(GroundAction { schema: si as u32, args: binding.clone(), pre, add, del });
                    if actions.len() > limits.max_actions {
                        return Err(PddlError::Limit(format!("more than {} ground actions", limits.max_actions)));
                    }
                }
                stack.pop();
                continue;
            }
            if pos >= domains[depth].len() {
                stack.pop();
                continue;
            }
            *stack.last_mut().unwrap() += 1;
            binding.truncate(depth);
            binding.push(domains[depth][pos]);
            if static_checks[depth + 1].iter().all(|a| holds(a, &binding)) {
                stack.push(0);
            }
        }
    }

    let goal_parameters = inst
        .goal_parameters
        .iter()
        .map(|(p, o)| {
            obj_id(o)
                .map(|id| (p.clone(), id))
                .ok_or_else(|| PddlError::semantic(format!("goal parameter '{p}' bound to undeclared object '{o}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut constants: Vec<u32> = dom.constants.iter().filter_map(|c| obj_id(&c.name)).collect();
    constants.sort_unstable();

    Ok(GroundProblem {
        name: inst.name.clone(),
        domain_name: dom.name.clone(),
        objects,
        object_types,
        type_members,
        predicates,
        atoms,
        atom_index,
        schema_names: schemas.iter().map(|s| s.name.clone()).collect(),
        actions,
        init,
        goal_facts: inst.goal.clone(),
        goal,
        goal_parameters,
        constants,
    })
}

fn cartesian(domains: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![Vec::new()];
    for d in domains {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                d.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}
