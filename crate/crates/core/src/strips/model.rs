//! Lifted STRIPS models as read from PDDL.

/// Root of every type hierarchy.
pub const OBJECT_TYPE: &str = "object";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

impl TypedName {
    pub fn new(name: impl Into<String>, ty: impl Into<String>) -> Self {
        TypedName { name: name.into(), ty: ty.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub parent: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedName>,
}

impl PredicateDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// A schema parameter, stored without the leading `?`.
    Var(String),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaAtom {
    pub predicate: String,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    pub pre: Vec<SchemaAtom>,
    pub add: Vec<SchemaAtom>,
    pub del: Vec<SchemaAtom>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainModel {
    pub name: String,
    pub requirements: Vec<String>,
    pub types: Vec<TypeDecl>,
    pub predicates: Vec<PredicateDecl>,
    pub constants: Vec<TypedName>,
    pub actions: Vec<ActionSchema>,
}

impl DomainModel {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn has_type(&self, name: &str) -> bool {
        name == OBJECT_TYPE || self.types.iter().any(|t| t.name == name)
    }

    fn parent(&self, name: &str) -> Option<&str> {
        self.types.iter().find(|t| t.name == name).map(|t| t.parent.as_str())
    }

    /// Whether `ty` equals `ancestor` or descends from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        if ancestor == OBJECT_TYPE {
            return true;
        }
        let mut cur = ty;
        for _ in 0..=self.types.len() {
            if cur == ancestor {
                return true;
            }
            match self.parent(cur) {
                Some(p) => cur = p,
                None => return false,
            }
        }
        false
    }

    /// Declared types other than the root, in declaration order.
    pub fn type_names(&self) -> impl Iterator<Item = &str> {
        self.types.iter().map(|t| t.name.as_str())
    }

    /// Predicates whose arity exceeds what the feature grammar handles.
    pub fn high_arity_predicates(&self) -> Vec<&str> {
        self.predicates.iter().filter(|p| p.arity() > 2).map(|p| p.name.as_str()).collect()
    }

    /// Predicates that no action adds or deletes.
    pub fn static_predicates(&self) -> Vec<&str> {
        self.predicates
            .iter()
            .filter(|p| !self.actions.iter().any(|a| a.add.iter().chain(&a.del).any(|e| e.predicate == p.name)))
            .map(|p| p.name.as_str())
            .collect()
    }
}

/// A ground atom by name, e.g. `on(b1, b2)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Fact {
    pub fn new(predicate: impl Into<String>, args: &[&str]) -> Self {
        Fact { predicate: predicate.into(), args: args.iter().map(|s| s.to_string()).collect() }
    }
}

impl std::fmt::Display for Fact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}({})", self.predicate, self.args.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceModel {
    pub name: String,
    pub domain: String,
    pub objects: Vec<TypedName>,
    pub init: Vec<Fact>,
    pub goal: Vec<Fact>,
    /// Named goal parameters bound to objects, e.g. `x -> b3`.
    pub goal_parameters: Vec<(String, String)>,
}

impl InstanceModel {
    pub fn with_goal_parameter(mut self, name: &str, object: &str) -> Self {
        self.goal_parameters.retain(|(n, _)| n != name);
        self.goal_parameters.push((name.to_string(), object.to_string()));
        self
    }
}
