//! PDDL writer; `parse(print(m)) == m` for every parsed model.

use std::fmt::Write;

use super::model::*;
use super::parse::GOAL_PARAMETER_DIRECTIVE;

fn typed_list(items: &[TypedName], var: bool) -> String {
    let prefix = if var { "?" } else { "" };
    let mut out = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let ty = &items[i].ty;
        let mut j = i;
        while j < items.len() && &items[j].ty == ty {
            out.push(format!("{prefix}{}", items[j].name));
            j += 1;
        }
        if ty != OBJECT_TYPE || j < items.len() {
            out.push(format!("- {ty}"));
        }
        i = j;
    }
    out.join(" ")
}

fn schema_atom(a: &SchemaAtom) -> String {
    let mut s = format!("({}", a.predicate);
    for t in &a.args {
        match t {
            Term::Var(v) => write!(s, " ?{v}").unwrap(),
            Term::Const(c) => write!(s, " {c}").unwrap(),
        }
    }
    s.push(')');
    s
}

fn fact(f: &Fact) -> String {
    if f.args.is_empty() {
        format!("({})", f.predicate)
    } else {
        format!("({} {})", f.predicate, f.args.join(" "))
    }
}

pub fn domain_to_pddl(dom: &DomainModel) -> String {
    let mut out = String::new();
    writeln!(out, "(define (domain {})", dom.name).unwrap();
    if !dom.requirements.is_empty() {
        writeln!(out, "  (:requirements {})", dom.requirements.join(" ")).unwrap();
    }
    if !dom.types.is_empty() {
        let types: Vec<TypedName> = dom.types.iter().map(|t| TypedName::new(&t.name, &t.parent)).collect();
        writeln!(out, "  (:types {})", typed_list(&types, false)).unwrap();
    }
    if !dom.constants.is_empty() {
        writeln!(out, "  (:constants {})", typed_list(&dom.constants, false)).unwrap();
    }
    writeln!(out, "  (:predicates").unwrap();
    for p in &dom.predicates {
        if p.params.is_empty() {
            writeln!(out, "    ({})", p.name).unwrap();
        } else {
            writeln!(out, "    ({} {})", p.name, typed_list(&p.params, true)).unwrap();
        }
    }
    writeln!(out, "  )").unwrap();
    for a in &dom.actions {
        writeln!(out, "  (:action {}", a.name).unwrap();
        writeln!(out, "    :parameters ({})", typed_list(&a.params, true)).unwrap();
        let pre: Vec<String> = a.pre.iter().map(schema_atom).collect();
        writeln!(out, "    :precondition (and {})", pre.join(" ")).unwrap();
        let eff: Vec<String> =
            a.add.iter().map(schema_atom).chain(a.del.iter().map(|d| format!("(not {})", schema_atom(d)))).collect();
        writeln!(out, "    :effect (and {}))", eff.join(" ")).unwrap();
    }
    out.push_str(")\n");
    out
}

pub fn instance_to_pddl(inst: &InstanceModel) -> String {
    let mut out = String::new();
    for (p, o) in &inst.goal_parameters {
        writeln!(out, ";; {GOAL_PARAMETER_DIRECTIVE} {p} {o}").unwrap();
    }
    writeln!(out, "(define (problem {})", inst.name).unwrap();
    if !inst.domain.is_empty() {
        writeln!(out, "  (:domain {})", inst.domain).unwrap();
    }
    writeln!(out, "  (:objects {})", typed_list(&inst.objects, false)).unwrap();
    let init: Vec<String> = inst.init.iter().map(fact).collect();
    writeln!(out, "  (:init {})", init.join(" ")).unwrap();
    let goal: Vec<String> = inst.goal.iter().map(fact).collect();
    writeln!(out, "  (:goal (and {})))", goal.join(" ")).unwrap();
    out
}
