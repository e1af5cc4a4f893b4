//! PDDL reader for the STRIPS subset with typing and constants.

use super::model::*;
use super::sexpr::{self, Pos, SExpr};
use super::PddlError;

const SUPPORTED_REQUIREMENTS: &[&str] = &[":strips", ":typing"];

fn unsupported(e: &SExpr, construct: impl Into<String>) -> PddlError {
    PddlError::Unsupported { pos: e.pos(), construct: construct.into() }
}

/// Reads `a b - t c` style lists. Untyped names get the root type.
fn typed_list(items: &[SExpr], what: &str) -> Result<Vec<TypedName>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let it = &items[i];
        if it.as_atom() == Some("-") {
            let ty = items.get(i + 1).ok_or_else(|| PddlError::syntax(it.pos(), "missing type after '-'"))?;
            if ty.head() == Some("either") {
                return Err(unsupported(ty, "either types"));
            }
            let ty = ty.expect_atom("type name")?;
            if pending.is_empty() {
                return Err(PddlError::syntax(it.pos(), format!("type '{ty}' does not follow any {what}")));
            }
            out.extend(pending.drain(..).map(|n| TypedName::new(n, ty)));
            i += 2;
            continue;
        }
        pending.push(it.expect_atom(what)?.to_string());
        i += 1;
    }
    out.extend(pending.into_iter().map(|n| TypedName::new(n, OBJECT_TYPE)));
    Ok(out)
}

fn strip_var(name: &str, pos: Pos) -> Result<String, PddlError> {
    name.strip_prefix('?')
        .map(str::to_string)
        .ok_or_else(|| PddlError::syntax(pos, format!("expected a variable, found '{name}'")))
}

fn check_define<'a>(root: &'a SExpr, kind: &str) -> Result<(&'a [SExpr], String), PddlError> {
    let items = root.expect_list("(define ...)")?;
    if root.head() != Some("define") {
        return Err(PddlError::syntax(root.pos(), "expected (define ...)"));
    }
    let header = items.get(1).ok_or_else(|| PddlError::syntax(root.pos(), format!("missing ({kind} <name>)")))?;
    let h = header.expect_list("header")?;
    if header.head() != Some(kind) || h.len() != 2 {
        return Err(PddlError::syntax(header.pos(), format!("expected ({kind} <name>)")));
    }
    Ok((&items[2..], h[1].expect_atom("name")?.to_string()))
}

pub fn parse_domain(text: &str) -> Result<DomainModel, PddlError> {
    let root = sexpr::parse(text)?;
    let (sections, name) = check_define(&root, "domain")?;
    let mut dom = DomainModel {
        name,
        requirements: Vec::new(),
        types: Vec::new(),
        predicates: Vec::new(),
        constants: Vec::new(),
        actions: Vec::new(),
    };
    for sec in sections {
        let items = sec.expect_list("domain section")?;
        let head = sec.head().unwrap_or("");
        match head {
            ":requirements" => {
                for r in &items[1..] {
                    let r_name = r.expect_atom("requirement")?;
                    if !SUPPORTED_REQUIREMENTS.contains(&r_name) {
                        return Err(unsupported(r, format!("requirement {r_name}")));
                    }
                    dom.requirements.push(r_name.to_string());
                }
            }
            ":types" => {
                for t in typed_list(&items[1..], "type name")? {
                    if t.name == OBJECT_TYPE {
                        continue;
                    }
                    if dom.types.iter().any(|d| d.name == t.name) {
                        return Err(PddlError::semantic(format!("type '{}' declared twice", t.name)));
                    }
                    dom.types.push(TypeDecl { name: t.name, parent: t.ty });
                }
            }
            ":constants" => dom.constants.extend(typed_list(&items[1..], "constant")?),
            ":predicates" => {
                for p in &items[1..] {
                    let parts = p.expect_list("predicate declaration")?;
                    let pname = parts
                        .first()
                        .ok_or_else(|| PddlError::syntax(p.pos(), "empty predicate declaration"))?
                        .expect_atom("predicate name")?;
                    let mut params = typed_list(&parts[1..], "parameter")?;
                    for prm in &mut params {
                        prm.name = strip_var(&prm.name, p.pos())?;
                    }
                    if dom.predicate(pname).is_some() {
                        return Err(PddlError::semantic(format!("predicate '{pname}' declared twice")));
                    }
                    dom.predicates.push(PredicateDecl { name: pname.to_string(), params });
                }
            }
            ":action" => dom.actions.push(parse_action(sec)?),
            ":functions" => return Err(unsupported(sec, "numeric fluents (:functions)")),
            ":derived" => return Err(unsupported(sec, "derived predicates")),
            ":durative-action" => return Err(unsupported(sec, "durative actions")),
            ":axiom" => return Err(unsupported(sec, "axioms")),
            _ => return Err(PddlError::syntax(sec.pos(), format!("unknown domain section '{head}'"))),
        }
    }
    validate_domain(&dom)?;
    Ok(dom)
}

fn parse_action(sec: &SExpr) -> Result<ActionSchema, PddlError> {
    let items = sec.as_list().unwrap_or_default();
    let name = items
        .get(1)
        .ok_or_else(|| PddlError::syntax(sec.pos(), "action without a name"))?
        .expect_atom("action name")?
        .to_string();
    let mut action = ActionSchema { name, params: Vec::new(), pre: Vec::new(), add: Vec::new(), del: Vec::new() };
    let mut i = 2;
    while i < items.len() {
        let key = items[i].expect_atom("action keyword")?;
        let val =
            items.get(i + 1).ok_or_else(|| PddlError::syntax(items[i].pos(), format!("missing value for {key}")))?;
        match key {
            ":parameters" => {
                let mut params = typed_list(val.expect_list("parameter list")?, "parameter")?;
                for p in &mut params {
                    p.name = strip_var(&p.name, val.pos())?;
                }
                action.params = params;
            }
            ":precondition" => action.pre = parse_precondition(val)?,
            ":effect" => parse_effect(val, &mut action.add, &mut action.del)?,
            _ => return Err(PddlError::syntax(items[i].pos(), format!("unknown action keyword '{key}'"))),
        }
        i += 2;
    }
    Ok(action)
}

fn parse_term(e: &SExpr) -> Result<Term, PddlError> {
    let s = e.expect_atom("term")?;
    Ok(match s.strip_prefix('?') {
        Some(v) => Term::Var(v.to_string()),
        None => Term::Const(s.to_string()),
    })
}

fn parse_schema_atom(e: &SExpr) -> Result<SchemaAtom, PddlError> {
    let items = e.expect_list("atom")?;
    let predicate =
        items.first().ok_or_else(|| PddlError::syntax(e.pos(), "empty atom"))?.expect_atom("predicate")?.to_string();
    let args = items[1..].iter().map(parse_term).collect::<Result<_, _>>()?;
    Ok(SchemaAtom { predicate, args })
}

fn parse_precondition(e: &SExpr) -> Result<Vec<SchemaAtom>, PddlError> {
    let items = e.expect_list("precondition")?;
    match e.head() {
        None if items.is_empty() => Ok(Vec::new()),
        Some("and") => {
            let mut out = Vec::new();
            for c in &items[1..] {
                out.extend(parse_precondition(c)?);
            }
            Ok(out)
        }
        Some("not") => Err(unsupported(e, "negative preconditions")),
        Some("or") | Some("imply") => Err(unsupported(e, "disjunctive preconditions")),
        Some("exists") | Some("forall") => Err(unsupported(e, "quantified preconditions")),
        Some("=") => Err(unsupported(e, "equality")),
        _ => Ok(vec![parse_schema_atom(e)?]),
    }
}

fn parse_effect(e: &SExpr, add: &mut Vec<SchemaAtom>, del: &mut Vec<SchemaAtom>) -> Result<(), PddlError> {
    let items = e.expect_list("effect")?;
    match e.head() {
        None if items.is_empty() => Ok(()),
        Some("and") => items[1..].iter().try_for_each(|c| parse_effect(c, add, del)),
        Some("not") => {
            let inner = items.get(1).ok_or_else(|| PddlError::syntax(e.pos(), "empty (not)"))?;
            if items.len() != 2 {
                return Err(PddlError::syntax(e.pos(), "(not) takes one atom"));
            }
            del.push(parse_schema_atom(inner)?);
            Ok(())
        }
        Some("when") => Err(unsupported(e, "conditional effects")),
        Some("forall") => Err(unsupported(e, "universal effects")),
        Some("increase") | Some("decrease") | Some("assign") => Err(unsupported(e, "numeric effects")),
        _ => {
            add.push(parse_schema_atom(e)?);
            Ok(())
        }
    }
}

fn validate_domain(dom: &DomainModel) -> Result<(), PddlError> {
    for t in &dom.types {
        if !dom.has_type(&t.parent) {
            return Err(PddlError::semantic(format!("type '{}' has undeclared parent '{}'", t.name, t.parent)));
        }
        if dom.is_subtype(&t.parent, &t.name) {
            return Err(PddlError::semantic(format!("type '{}' is part of a cycle", t.name)));
        }
    }
    let check_ty = |ty: &str, ctx: &str| {
        if dom.has_type(ty) {
            Ok(())
        } else {
            Err(PddlError::semantic(format!("undeclared type '{ty}' in {ctx}")))
        }
    };
    for c in &dom.constants {
        check_ty(&c.ty, &format!("constant '{}'", c.name))?;
    }
    for p in &dom.predicates {
        for prm in &p.params {
            check_ty(&prm.ty, &format!("predicate '{}'", p.name))?;
        }
    }
    let mut seen = std::collections::HashSet::new();
    for a in &dom.actions {
        if !seen.insert(&a.name) {
            return Err(PddlError::semantic(format!("action '{}' declared twice", a.name)));
        }
        for prm in &a.params {
            check_ty(&prm.ty, &format!("action '{}'", a.name))?;
        }
        for atom in a.pre.iter().chain(&a.add).chain(&a.del) {
            let decl = dom.predicate(&atom.predicate).ok_or_else(|| {
                PddlError::semantic(format!("action '{}' uses undeclared predicate '{}'", a.name, atom.predicate))
            })?;
            if decl.arity() != atom.args.len() {
                return Err(PddlError::semantic(format!(
                    "action '{}': predicate '{}' expects {} arguments, got {}",
                    a.name,
                    atom.predicate,
                    decl.arity(),
                    atom.args.len()
                )));
            }
            for (arg, prm) in atom.args.iter().zip(&decl.params) {
                let ty = match arg {
                    Term::Var(v) => {
                        &a.params
                            .iter()
                            .find(|p| &p.name == v)
                            .ok_or_else(|| {
                                PddlError::semantic(format!("action '{}' uses undeclared variable ?{v}", a.name))
                            })?
                            .ty
                    }
                    Term::Const(c) => {
                        &dom.constants
                            .iter()
                            .find(|k| &k.name == c)
                            .ok_or_else(|| {
                                PddlError::semantic(format!("action '{}' uses undeclared constant '{c}'", a.name))
                            })?
                            .ty
                    }
                };
                if !dom.is_subtype(ty, &prm.ty) && !dom.is_subtype(&prm.ty, ty) {
                    return Err(PddlError::semantic(format!(
                        "action '{}': argument of type '{ty}' incompatible with '{}' in predicate '{}'",
                        a.name, prm.ty, atom.predicate
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Marker comment that binds a goal parameter in a problem file:
/// `;; @goal-parameter x b3`.
pub const GOAL_PARAMETER_DIRECTIVE: &str = "@goal-parameter";

fn goal_parameter_directives(text: &str) -> Result<Vec<(String, String)>, PddlError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let Some(comment) = line.trim_start().strip_prefix(';') else { continue };
        let comment = comment.trim_start_matches(';').trim();
        let Some(rest) = comment.strip_prefix(GOAL_PARAMETER_DIRECTIVE) else { continue };
        let parts: Vec<&str> = rest.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(PddlError::syntax(
                Pos { line: i + 1, col: 1 },
                format!("expected '{GOAL_PARAMETER_DIRECTIVE} <name> <object>'"),
            ));
        }
        out.push((parts[0].to_lowercase(), parts[1].to_lowercase()));
    }
    Ok(out)
}

fn parse_fact(e: &SExpr) -> Result<Fact, PddlError> {
    let items = e.expect_list("ground atom")?;
    if e.head() == Some("not") {
        return Err(unsupported(e, "negative literals in problem"));
    }
    if e.head() == Some("=") {
        return Err(unsupported(e, "numeric fluents in problem"));
    }
    let predicate =
        items.first().ok_or_else(|| PddlError::syntax(e.pos(), "empty atom"))?.expect_atom("predicate")?.to_string();
    let args = items[1..].iter().map(|a| a.expect_atom("object").map(str::to_string)).collect::<Result<_, _>>()?;
    Ok(Fact { predicate, args })
}

fn parse_goal(e: &SExpr, out: &mut Vec<Fact>) -> Result<(), PddlError> {
    let items = e.expect_list("goal")?;
    match e.head() {
        None if items.is_empty() => Ok(()),
        Some("and") => items[1..].iter().try_for_each(|g| parse_goal(g, out)),
        Some("or") | Some("imply") => Err(unsupported(e, "disjunctive goals")),
        Some("exists") | Some("forall") => Err(unsupported(e, "quantified goals")),
        Some("not") => Err(unsupported(e, "negative goals")),
        _ => {
            out.push(parse_fact(e)?);
            Ok(())
        }
    }
}

pub fn parse_instance(text: &str, dom: &DomainModel) -> Result<InstanceModel, PddlError> {
    let root = sexpr::parse(text)?;
    let (sections, name) = check_define(&root, "problem")?;
    let mut inst = InstanceModel {
        name,
        domain: String::new(),
        objects: Vec::new(),
        init: Vec::new(),
        goal: Vec::new(),
        goal_parameters: goal_parameter_directives(text)?,
    };
    for sec in sections {
        let items = sec.expect_list("problem section")?;
        match sec.head().unwrap_or("") {
            ":domain" => {
                inst.domain = items
                    .get(1)
                    .ok_or_else(|| PddlError::syntax(sec.pos(), "missing domain name"))?
                    .expect_atom("domain name")?
                    .to_string();
            }
            ":objects" => inst.objects.extend(typed_list(&items[1..], "object")?),
            ":init" => {
                for f in &items[1..] {
                    inst.init.push(parse_fact(f)?);
                }
            }
            ":goal" => {
                let g = items.get(1).ok_or_else(|| PddlError::syntax(sec.pos(), "missing goal formula"))?;
                parse_goal(g, &mut inst.goal)?;
            }
            ":requirements" => {}
            ":metric" => return Err(unsupported(sec, "metrics")),
            other => return Err(PddlError::syntax(sec.pos(), format!("unknown problem section '{other}'"))),
        }
    }
    if !inst.domain.is_empty() && inst.domain != dom.name {
        return Err(PddlError::semantic(format!(
            "problem '{}' is for domain '{}', not '{}'",
            inst.name, inst.domain, dom.name
        )));
    }
    validate_instance(&inst, dom)?;
    Ok(inst)
}

/// Type of a named object or domain constant.
pub fn object_type<'a>(inst: &'a InstanceModel, dom: &'a DomainModel, name: &str) -> Option<&'a str> {
    inst.objects.iter().chain(&dom.constants).find(|o| o.name == name).map(|o| o.ty.as_str())
}

pub fn validate_instance(inst: &InstanceModel, dom: &DomainModel) -> Result<(), PddlError> {
    let mut seen = std::collections::HashSet::new();
    for o in &inst.objects {
        if !dom.has_type(&o.ty) {
            return Err(PddlError::semantic(format!("object '{}' has undeclared type '{}'", o.name, o.ty)));
        }
        if !seen.insert(&o.name) || dom.constants.iter().any(|c| c.name == o.name) {
            return Err(PddlError::semantic(format!("object '{}' declared twice", o.name)));
        }
    }
    for (section, facts) in [("init", &inst.init), ("goal", &inst.goal)] {
        for f in facts {
            let decl = dom
                .predicate(&f.predicate)
                .ok_or_else(|| PddlError::semantic(format!("{section}: undeclared predicate '{}'", f.predicate)))?;
            if decl.arity() != f.args.len() {
                return Err(PddlError::semantic(format!(
                    "{section}: '{f}' has {} arguments, predicate '{}' expects {}",
                    f.args.len(),
                    f.predicate,
                    decl.arity()
                )));
            }
            for (arg, prm) in f.args.iter().zip(&decl.params) {
                let ty = object_type(inst, dom, arg)
                    .ok_or_else(|| PddlError::semantic(format!("{section}: undeclared object '{arg}' in '{f}'")))?;
                if !dom.is_subtype(ty, &prm.ty) {
                    return Err(PddlError::semantic(format!(
                        "{section}: object '{arg}' of type '{ty}' does not fit '{}' in '{f}'",
                        prm.ty
                    )));
                }
            }
        }
    }
    for (p, o) in &inst.goal_parameters {
        if object_type(inst, dom, o).is_none() {
            return Err(PddlError::semantic(format!("goal parameter '{p}' bound to undeclared object '{o}'")));
        }
    }
    Ok(())
}
