//! STRIPS task model: grounded predicates, set-of-atoms states, action
//! schemas with positive preconditions and add/delete effects, grounding,
//! state transitions and plan validation.
//!
//! States are plain sorted sets of grounded predicates, so equality,
//! hashing and the canonical ordering used for deterministic tie-breaking
//! all come straight from the representation — there is no hashing
//! shortcut that could conflate distinct states.

mod ground;
mod parser;
mod printer;

pub use parser::{parse_domain, parse_problem, parse_task, TaskError};
pub use printer::{domain_to_pddl, problem_to_pddl};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A grounded predicate: name plus object arguments, e.g. `(At c1 SFO)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Predicate {
    pub name: String,
    pub args: Vec<String>,
}

impl Predicate {
    pub fn new(name: impl Into<String>, args: &[&str]) -> Self {
        Predicate {
            name: name.into(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// A planning state: the set of grounded predicates that currently hold.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(BTreeSet<Predicate>);

impl State {
    pub fn new() -> Self {
        State(BTreeSet::new())
    }

    pub fn from_predicates(preds: impl IntoIterator<Item = Predicate>) -> Self {
        State(preds.into_iter().collect())
    }

    pub fn contains(&self, p: &Predicate) -> bool {
        self.0.contains(p)
    }

    /// True when every predicate in `preds` holds in this state.
    pub fn satisfies(&self, preds: &BTreeSet<Predicate>) -> bool {
        preds.iter().all(|p| self.0.contains(p))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Predicate> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, p: Predicate) {
        self.0.insert(p);
    }

    pub fn remove(&mut self, p: &Predicate) {
        self.0.remove(p);
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for p in &self.0 {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        Ok(())
    }
}

/// A term in an action schema: either a `?variable` or a literal object.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Obj(String),
}

/// An unground atom appearing in schema preconditions or effects.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub name: String,
    pub args: Vec<Term>,
}

/// A lifted action schema with typed parameters.
///
/// Preconditions are positive conjunctions; effects split into add and
/// delete sets with `add ∩ del = ∅` (enforced at parse time). `cost`
/// defaults to 1 and applies to every grounding of the schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    /// (variable, type) pairs in declaration order.
    pub params: Vec<(String, String)>,
    pub preconditions: BTreeSet<Atom>,
    pub add_effects: BTreeSet<Atom>,
    pub del_effects: BTreeSet<Atom>,
    pub cost: u64,
}

/// A schema instantiated with concrete objects.
///
/// Identity is the (schema, binding) pair; preconditions and effects are
/// derived from the schema and carried here for fast application. Field
/// order matters: the derived `Ord` gives the canonical ordering of the
/// grounded action set (schema name first, then binding).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundedAction {
    pub schema: String,
    /// Objects bound to the schema parameters, in parameter order.
    pub binding: Vec<String>,
    pub preconditions: BTreeSet<Predicate>,
    pub add_effects: BTreeSet<Predicate>,
    pub del_effects: BTreeSet<Predicate>,
    pub cost: u64,
}

impl GroundedAction {
    pub fn applicable(&self, state: &State) -> bool {
        state.satisfies(&self.preconditions)
    }

    /// Canonical text form, e.g. `(LOAD c1 p1 SFO)`.
    pub fn text(&self) -> String {
        let mut s = format!("({}", self.schema);
        for b in &self.binding {
            s.push(' ');
            s.push_str(b);
        }
        s.push(')');
        s
    }
}

impl fmt::Display for GroundedAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// A full planning task: domain vocabulary, objects, schemas, initial
/// state, goal, and (after [`Task::ground`]) the grounded action set `O`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub domain_name: String,
    pub problem_name: String,
    /// Declared types, in declaration order.
    pub types: Vec<String>,
    /// Object name → type.
    pub objects: BTreeMap<String, String>,
    /// Predicate name → arity (declared or inferred from first use).
    pub predicates: BTreeMap<String, usize>,
    pub schemas: Vec<ActionSchema>,
    pub init: State,
    /// Positive conjunctive goal.
    pub goal: BTreeSet<Predicate>,
    /// Grounded actions in canonical order; empty until grounded.
    pub actions: Vec<GroundedAction>,
}

impl Task {
    /// Populate the grounded action set: one action per schema and
    /// type-consistent binding (self-bindings included), sorted by
    /// (schema name, binding).
    pub fn ground(mut self) -> Task {
        self.actions = ground::ground_schemas(&self);
        self
    }

    pub fn is_goal(&self, state: &State) -> bool {
        state.satisfies(&self.goal)
    }

    /// Clone of this task with the actions at `removed` indices absent.
    pub fn without_actions(&self, removed: &BTreeSet<usize>) -> Task {
        let mut t = self.clone();
        t.actions = self
            .actions
            .iter()
            .enumerate()
            .filter(|(i, _)| !removed.contains(i))
            .map(|(_, a)| a.clone())
            .collect();
        t
    }

    /// Index of the grounded action with this schema name and binding.
    pub fn find_action(&self, schema: &str, binding: &[&str]) -> Option<usize> {
        self.actions
            .iter()
            .position(|a| a.schema == schema && a.binding.iter().map(String::as_str).eq(binding.iter().copied()))
    }
}

/// Plan cost with an explicit unsolvable marker that orders above every
/// finite cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlanCost {
    Finite(u64),
    Infinite,
}

impl PlanCost {
    pub fn is_finite(self) -> bool {
        matches!(self, PlanCost::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            PlanCost::Finite(c) => Some(c),
            PlanCost::Infinite => None,
        }
    }
}

impl fmt::Display for PlanCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanCost::Finite(c) => write!(f, "{c}"),
            PlanCost::Infinite => write!(f, "infinite"),
        }
    }
}

impl Serialize for PlanCost {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PlanCost::Finite(c) => s.serialize_u64(*c),
            PlanCost::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for PlanCost {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(PlanCost::Finite)
                .ok_or_else(|| D::Error::custom("plan cost must be a non-negative integer")),
            serde_json::Value::String(s) if s == "infinite" => Ok(PlanCost::Infinite),
            _ => Err(D::Error::custom("expected integer or \"infinite\"")),
        }
    }
}

/// A sequence of grounded actions together with its summed cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub actions: Vec<GroundedAction>,
    pub total_cost: u64,
}

impl Plan {
    pub fn new(actions: Vec<GroundedAction>) -> Self {
        let total_cost = actions.iter().map(|a| a.cost).sum();
        Plan { actions, total_cost }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// One action per line, in canonical text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in &self.actions {
            out.push_str(&a.text());
            out.push('\n');
        }
        out
    }

    /// Parse a plan file (one `(NAME obj ...)` per line) against a grounded
    /// task, resolving each line to an action in `task.actions`.
    pub fn from_text(task: &Task, text: &str) -> Result<Plan, PlanViolation> {
        let mut actions = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with(';') || line.starts_with('#') {
                continue;
            }
            let step = actions.len() + 1;
            let inner = line
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| PlanViolation::UnknownAction {
                    step,
                    text: format!("line {}: not of the form (NAME obj ...)", lineno + 1),
                })?;
            let mut parts = inner.split_whitespace();
            let name = parts.next().ok_or_else(|| PlanViolation::UnknownAction {
                step,
                text: format!("line {}: empty action", lineno + 1),
            })?;
            let args: Vec<&str> = parts.collect();
            let idx = task
                .find_action(name, &args)
                .ok_or_else(|| PlanViolation::UnknownAction {
                    step,
                    text: line.to_string(),
                })?;
            actions.push(task.actions[idx].clone());
        }
        Ok(Plan::new(actions))
    }
}

/// Why an action could not be applied to a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApplyError {
    pub action: String,
    pub missing: Predicate,
}

impl fmt::Display for ApplyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} is not applicable: {} does not hold", self.action, self.missing)
    }
}

impl std::error::Error for ApplyError {}

/// Apply `action` to `state`: check preconditions, then
/// `(state ∖ del) ∪ add`. The input state is untouched.
pub fn apply_action(state: &State, action: &GroundedAction) -> Result<State, ApplyError> {
    for p in &action.preconditions {
        if !state.contains(p) {
            return Err(ApplyError {
                action: action.text(),
                missing: p.clone(),
            });
        }
    }
    let mut next = state.clone();
    for p in &action.del_effects {
        next.remove(p);
    }
    for p in &action.add_effects {
        next.insert(p.clone());
    }
    Ok(next)
}

/// Why a plan failed validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanViolation {
    /// A plan line named an action that is not in the task's grounded set.
    UnknownAction { step: usize, text: String },
    /// A precondition did not hold when the step was applied (1-based).
    Precondition {
        step: usize,
        action: String,
        missing: Predicate,
    },
    /// The final state does not satisfy the goal.
    GoalNotReached { missing: Predicate },
}

impl fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanViolation::UnknownAction { step, text } => {
                write!(f, "step {step}: unknown action {text}")
            }
            PlanViolation::Precondition { step, action, missing } => {
                write!(f, "step {step}: {action} requires {missing}, which does not hold")
            }
            PlanViolation::GoalNotReached { missing } => {
                write!(f, "goal not reached: {missing} does not hold in the final state")
            }
        }
    }
}

impl std::error::Error for PlanViolation {}

/// Replay `plan` from the task's initial state. Returns the summed cost on
/// success; on failure, the 1-based step index and the missing predicate.
pub fn validate_plan(task: &Task, plan: &Plan) -> Result<u64, PlanViolation> {
    let mut state = task.init.clone();
    let mut cost = 0u64;
    for (i, action) in plan.actions.iter().enumerate() {
        match apply_action(&state, action) {
            Ok(next) => state = next,
            Err(e) => {
                return Err(PlanViolation::Precondition {
                    step: i + 1,
                    action: e.action,
                    missing: e.missing,
                })
            }
        }
        cost += action.cost;
    }
    for g in &task.goal {
        if !state.contains(g) {
            return Err(PlanViolation::GoalNotReached { missing: g.clone() });
        }
    }
    Ok(cost)
}
