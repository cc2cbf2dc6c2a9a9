//! Schema grounding: enumerate every type-consistent binding of every
//! schema, including bindings that repeat an object (a plane may "fly"
//! from an airport to itself; such actions ground fine and are simply
//! useless). The result is sorted by (schema name, binding) so action
//! indices are stable across runs.

use super::{Atom, GroundedAction, Predicate, Task, Term};

fn instantiate(atom: &Atom, params: &[(String, String)], binding: &[String]) -> Predicate {
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Obj(o) => o.clone(),
            Term::Var(v) => {
                let idx = params
                    .iter()
                    .position(|(p, _)| p == v)
                    .expect("parser guarantees every variable is a parameter");
                binding[idx].clone()
            }
        })
        .collect();
    Predicate {
        name: atom.name.clone(),
        args,
    }
}

pub(super) fn ground_schemas(task: &Task) -> Vec<GroundedAction> {
    let mut out = Vec::new();
    for schema in &task.schemas {
        // Candidate objects per parameter, already name-sorted because
        // `task.objects` is a BTreeMap. The pseudo-type `object` matches
        // every declared object.
        let candidates: Vec<Vec<&String>> = schema
            .params
            .iter()
            .map(|(_, ty)| {
                task.objects
                    .iter()
                    .filter(|(_, oty)| ty == "object" || *oty == ty)
                    .map(|(o, _)| o)
                    .collect()
            })
            .collect();
        if candidates.iter().any(|c| c.is_empty()) && !schema.params.is_empty() {
            continue;
        }

        let mut binding: Vec<String> = vec![String::new(); schema.params.len()];
        enumerate(task, schema, &candidates, 0, &mut binding, &mut out);
    }
    out.sort();
    out
}

fn enumerate(
    task: &Task,
    schema: &super::ActionSchema,
    candidates: &[Vec<&String>],
    depth: usize,
    binding: &mut Vec<String>,
    out: &mut Vec<GroundedAction>,
) {
    if depth == candidates.len() {
        out.push(GroundedAction {
            schema: schema.name.clone(),
            binding: binding.clone(),
            preconditions: schema
                .preconditions
                .iter()
                .map(|a| instantiate(a, &schema.params, binding))
                .collect(),
            add_effects: schema
                .add_effects
                .iter()
                .map(|a| instantiate(a, &schema.params, binding))
                .collect(),
            del_effects: schema
                .del_effects
                .iter()
                .map(|a| instantiate(a, &schema.params, binding))
                .collect(),
            cost: schema.cost,
        });
        return;
    }
    for obj in &candidates[depth] {
        binding[depth] = (*obj).clone();
        enumerate(task, schema, candidates, depth + 1, binding, out);
    }
}
