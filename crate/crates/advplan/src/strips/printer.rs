//! Canonical PDDL emission. Printing a parsed task and parsing the output
//! again yields an equal `Task`, which makes the serialization usable as
//! an interchange format and not just a debugging aid.

use super::{Atom, Task, Term};
use std::fmt::Write as _;

fn write_atom(out: &mut String, atom: &Atom) {
    out.push('(');
    out.push_str(&atom.name);
    for t in &atom.args {
        out.push(' ');
        match t {
            Term::Var(v) => out.push_str(v),
            Term::Obj(o) => out.push_str(o),
        }
    }
    out.push(')');
}

/// Emit the domain half of a task as PDDL.
pub fn domain_to_pddl(task: &Task) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", task.domain_name);

    let costs = task.schemas.iter().any(|s| s.cost != 1);
    let mut reqs = vec![":strips"];
    if !task.types.is_empty() {
        reqs.push(":typing");
    }
    if costs {
        reqs.push(":action-costs");
    }
    let _ = writeln!(out, "  (:requirements {})", reqs.join(" "));

    if !task.types.is_empty() {
        let _ = writeln!(out, "  (:types {})", task.types.join(" "));
    }

    if !task.predicates.is_empty() {
        out.push_str("  (:predicates");
        for (name, arity) in &task.predicates {
            out.push_str(" (");
            out.push_str(name);
            for i in 0..*arity {
                let _ = write!(out, " ?x{i}");
            }
            out.push(')');
        }
        out.push_str(")\n");
    }

    for schema in &task.schemas {
        let _ = writeln!(out, "  (:action {}", schema.name);
        out.push_str("    :parameters (");
        for (i, (var, ty)) in schema.params.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{var} - {ty}");
        }
        out.push_str(")\n");
        if !schema.preconditions.is_empty() {
            out.push_str("    :precondition (and");
            for a in &schema.preconditions {
                out.push(' ');
                write_atom(&mut out, a);
            }
            out.push_str(")\n");
        }
        out.push_str("    :effect (and");
        for a in &schema.add_effects {
            out.push(' ');
            write_atom(&mut out, a);
        }
        for a in &schema.del_effects {
            out.push_str(" (not ");
            write_atom(&mut out, a);
            out.push(')');
        }
        out.push(')');
        if schema.cost != 1 {
            let _ = write!(out, "\n    :cost {}", schema.cost);
        }
        out.push_str(")\n");
    }
    out.push_str(")\n");
    out
}

/// Emit the problem half of a task as PDDL.
pub fn problem_to_pddl(task: &Task) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", task.problem_name);
    let _ = writeln!(out, "  (:domain {})", task.domain_name);

    out.push_str("  (:objects");
    for (obj, ty) in &task.objects {
        let _ = write!(out, " {obj} - {ty}");
    }
    out.push_str(")\n");

    out.push_str("  (:init");
    for p in task.init.iter() {
        let _ = write!(out, " {p}");
    }
    out.push_str(")\n");

    out.push_str("  (:goal (and");
    for p in &task.goal {
        let _ = write!(out, " {p}");
    }
    out.push_str(")))\n");
    out
}
