//! Parser for the supported PDDL subset: `:strips`, `:typing` with a flat
//! type list, and per-schema costs behind `:action-costs`. Anything
//! outside the subset is rejected loudly by feature name rather than
//! silently dropped.

use super::{ActionSchema, Atom, Predicate, State, Task, Term};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Parse failure, with source position where one is meaningful.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskError {
    Syntax { line: u32, col: u32, message: String },
    UnsupportedFeature { line: u32, col: u32, feature: String },
    UnknownType { line: u32, col: u32, name: String },
    UnknownObject { line: u32, col: u32, name: String },
    /// A predicate was used with a different arity than its declaration
    /// or first use.
    ArityMismatch { line: u32, col: u32, predicate: String, expected: usize, found: usize },
    FreeVariable { line: u32, col: u32, variable: String, action: String },
    /// An add effect and a delete effect name the same atom.
    ConflictingEffects { line: u32, col: u32, action: String },
    EmptyGoal,
    /// The problem's `(:domain ...)` does not match the loaded domain.
    DomainMismatch { expected: String, found: String },
}

impl fmt::Display for TaskError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaskError::Syntax { line, col, message } => write!(f, "{line}:{col}: {message}"),
            TaskError::UnsupportedFeature { line, col, feature } => {
                write!(f, "{line}:{col}: unsupported PDDL feature {feature}")
            }
            TaskError::UnknownType { line, col, name } => {
                write!(f, "{line}:{col}: unknown type {name}")
            }
            TaskError::UnknownObject { line, col, name } => {
                write!(f, "{line}:{col}: unknown object {name}")
            }
            TaskError::ArityMismatch { line, col, predicate, expected, found } => write!(
                f,
                "{line}:{col}: predicate {predicate} used with {found} arguments, expected {expected}"
            ),
            TaskError::FreeVariable { line, col, variable, action } => {
                write!(f, "{line}:{col}: variable {variable} in action {action} is not a parameter")
            }
            TaskError::ConflictingEffects { line, col, action } => {
                write!(f, "{line}:{col}: action {action} adds and deletes the same atom")
            }
            TaskError::EmptyGoal => write!(f, "problem has an empty goal"),
            TaskError::DomainMismatch { expected, found } => {
                write!(f, "problem requires domain {found}, but domain {expected} was loaded")
            }
        }
    }
}

impl std::error::Error for TaskError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: u32,
    col: u32,
}

#[derive(Debug, Clone)]
enum Sexpr {
    Sym(String, Pos),
    List(Vec<Sexpr>, Pos),
}

impl Sexpr {
    fn pos(&self) -> Pos {
        match self {
            Sexpr::Sym(_, p) | Sexpr::List(_, p) => *p,
        }
    }

    fn as_sym(&self) -> Option<(&str, Pos)> {
        match self {
            Sexpr::Sym(s, p) => Some((s.as_str(), *p)),
            Sexpr::List(..) => None,
        }
    }

    fn as_list(&self) -> Option<(&[Sexpr], Pos)> {
        match self {
            Sexpr::List(items, p) => Some((items.as_slice(), *p)),
            Sexpr::Sym(..) => None,
        }
    }
}

fn syntax(pos: Pos, message: impl Into<String>) -> TaskError {
    TaskError::Syntax {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    }
}

/// Tokenize and build one top-level s-expression.
fn read_sexpr(text: &str) -> Result<Sexpr, TaskError> {
    let mut stack: Vec<(Vec<Sexpr>, Pos)> = Vec::new();
    let mut top: Option<Sexpr> = None;
    let mut line: u32 = 1;
    let mut col: u32 = 0;
    let mut chars = text.chars().peekable();

    let push = |item: Sexpr, stack: &mut Vec<(Vec<Sexpr>, Pos)>, top: &mut Option<Sexpr>| -> Result<(), TaskError> {
        if let Some((items, _)) = stack.last_mut() {
            items.push(item);
            Ok(())
        } else if top.is_none() {
            *top = Some(item);
            Ok(())
        } else {
            Err(syntax(item.pos(), "unexpected content after top-level form"))
        }
    };

    while let Some(c) = chars.next() {
        col += 1;
        match c {
            '\n' => {
                line += 1;
                col = 0;
            }
            ';' => {
                for c2 in chars.by_ref() {
                    if c2 == '\n' {
                        line += 1;
                        col = 0;
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {}
            '(' => stack.push((Vec::new(), Pos { line, col })),
            ')' => {
                let (items, pos) = stack
                    .pop()
                    .ok_or_else(|| syntax(Pos { line, col }, "unmatched )"))?;
                push(Sexpr::List(items, pos), &mut stack, &mut top)?;
            }
            c => {
                let pos = Pos { line, col };
                let mut sym = String::new();
                sym.push(c);
                while let Some(&c2) = chars.peek() {
                    if c2.is_whitespace() || c2 == '(' || c2 == ')' || c2 == ';' {
                        break;
                    }
                    sym.push(c2);
                    chars.next();
                    col += 1;
                }
                push(Sexpr::Sym(sym, pos), &mut stack, &mut top)?;
            }
        }
    }
    if let Some((_, pos)) = stack.last() {
        return Err(syntax(*pos, "unclosed ("));
    }
    top.ok_or_else(|| syntax(Pos { line: 1, col: 1 }, "empty input"))
}

fn keyword_eq(sym: &str, kw: &str) -> bool {
    sym.eq_ignore_ascii_case(kw)
}

/// Parsed `(define (domain ...))` form, prior to meeting a problem.
#[derive(Debug, Clone)]
pub struct Domain {
    pub name: String,
    pub types: Vec<String>,
    pub predicates: BTreeMap<String, usize>,
    pub schemas: Vec<ActionSchema>,
    action_costs: bool,
}

/// Typed-list parser: `a b - t c d - u` → pairs with their types.
/// `default_type` applies to a trailing untyped group.
fn parse_typed_list(
    items: &[Sexpr],
    default_type: &str,
) -> Result<Vec<(String, String, Pos)>, TaskError> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut iter = items.iter();
    while let Some(item) = iter.next() {
        let (sym, pos) = item
            .as_sym()
            .ok_or_else(|| syntax(item.pos(), "expected a name in typed list"))?;
        if sym == "-" {
            let ty_item = iter
                .next()
                .ok_or_else(|| syntax(pos, "expected a type after -"))?;
            let (ty, _) = ty_item
                .as_sym()
                .ok_or_else(|| syntax(ty_item.pos(), "expected a type name"))?;
            for (name, npos) in pending.drain(..) {
                out.push((name, ty.to_string(), npos));
            }
        } else {
            pending.push((sym.to_string(), pos));
        }
    }
    for (name, npos) in pending.drain(..) {
        out.push((name, default_type.to_string(), npos));
    }
    Ok(out)
}

/// Shared arity bookkeeping: declared arities are enforced, otherwise the
/// first use fixes the arity for the rest of the task.
fn check_arity(
    predicates: &mut BTreeMap<String, usize>,
    name: &str,
    found: usize,
    pos: Pos,
) -> Result<(), TaskError> {
    match predicates.get(name) {
        Some(&expected) if expected != found => Err(TaskError::ArityMismatch {
            line: pos.line,
            col: pos.col,
            predicate: name.to_string(),
            expected,
            found,
        }),
        Some(_) => Ok(()),
        None => {
            predicates.insert(name.to_string(), found);
            Ok(())
        }
    }
}

fn parse_schema_atom(
    items: &[Sexpr],
    pos: Pos,
    action: &str,
    params: &BTreeMap<String, String>,
    predicates: &mut BTreeMap<String, usize>,
) -> Result<Atom, TaskError> {
    let (name, npos) = items
        .first()
        .and_then(|i| i.as_sym())
        .ok_or_else(|| syntax(pos, "expected a predicate"))?;
    if name.starts_with(':') || name.starts_with('?') {
        return Err(syntax(npos, format!("expected a predicate name, found {name}")));
    }
    let mut args = Vec::new();
    for item in &items[1..] {
        let (sym, spos) = item
            .as_sym()
            .ok_or_else(|| syntax(item.pos(), "expected an argument name"))?;
        if let Some(var) = sym.strip_prefix('?') {
            if !params.contains_key(sym) {
                return Err(TaskError::FreeVariable {
                    line: spos.line,
                    col: spos.col,
                    variable: format!("?{var}"),
                    action: action.to_string(),
                });
            }
            args.push(Term::Var(sym.to_string()));
        } else {
            args.push(Term::Obj(sym.to_string()));
        }
    }
    check_arity(predicates, name, args.len(), npos)?;
    Ok(Atom {
        name: name.to_string(),
        args,
    })
}

/// Accepts a bare atom or an `(and ...)` of atoms. `(not ...)` is rejected
/// (as a whole-formula or conjunct) unless `allow_not` routes it to `neg`.
fn parse_conjunction<'a>(
    form: &'a Sexpr,
    allow_not: bool,
    context: &str,
) -> Result<Vec<(&'a [Sexpr], Pos, bool)>, TaskError> {
    let (items, _) = form
        .as_list()
        .ok_or_else(|| syntax(form.pos(), format!("expected {context} formula")))?;
    let head = items.first().and_then(|i| i.as_sym());
    let conjuncts: Vec<&Sexpr> = match head {
        Some((h, _)) if keyword_eq(h, "and") => items[1..].iter().collect(),
        _ => vec![form],
    };
    let mut out = Vec::new();
    for c in conjuncts {
        let (citems, cpos) = c
            .as_list()
            .ok_or_else(|| syntax(c.pos(), format!("expected an atom in {context}")))?;
        match citems.first().and_then(|i| i.as_sym()) {
            Some((h, hpos)) if keyword_eq(h, "not") => {
                if !allow_not {
                    return Err(TaskError::UnsupportedFeature {
                        line: hpos.line,
                        col: hpos.col,
                        feature: format!("negation in {context}"),
                    });
                }
                if citems.len() != 2 {
                    return Err(syntax(cpos, "(not ...) takes exactly one atom"));
                }
                let (inner, ipos) = citems[1]
                    .as_list()
                    .ok_or_else(|| syntax(citems[1].pos(), "expected an atom inside (not ...)"))?;
                out.push((inner, ipos, true));
            }
            Some((h, hpos)) if keyword_eq(h, "and") || keyword_eq(h, "or") || keyword_eq(h, "forall")
                || keyword_eq(h, "exists") || keyword_eq(h, "when") || keyword_eq(h, "imply") =>
            {
                return Err(TaskError::UnsupportedFeature {
                    line: hpos.line,
                    col: hpos.col,
                    feature: format!("{h} in {context}"),
                });
            }
            _ => out.push((citems, cpos, false)),
        }
    }
    Ok(out)
}

const SUPPORTED_REQUIREMENTS: [&str; 3] = [":strips", ":typing", ":action-costs"];

/// Parse a `(define (domain ...))` file.
pub fn parse_domain(text: &str) -> Result<Domain, TaskError> {
    let top = read_sexpr(text)?;
    let (items, pos) = top.as_list().ok_or_else(|| syntax(top.pos(), "expected (define ...)"))?;
    match items.first().and_then(|i| i.as_sym()) {
        Some((h, _)) if keyword_eq(h, "define") => {}
        _ => return Err(syntax(pos, "expected (define (domain ...) ...)")),
    }
    let (head, hpos) = items
        .get(1)
        .and_then(|i| i.as_list())
        .ok_or_else(|| syntax(pos, "expected (domain NAME)"))?;
    let name = match (
        head.first().and_then(|i| i.as_sym()),
        head.get(1).and_then(|i| i.as_sym()),
    ) {
        (Some((kw, _)), Some((n, _))) if keyword_eq(kw, "domain") => n.to_string(),
        _ => return Err(syntax(hpos, "expected (domain NAME)")),
    };

    let mut domain = Domain {
        name,
        types: Vec::new(),
        predicates: BTreeMap::new(),
        schemas: Vec::new(),
        action_costs: false,
    };
    let mut typing_declared = false;

    for block in &items[2..] {
        let (bitems, bpos) = block.as_list().ok_or_else(|| syntax(block.pos(), "expected a (:...) block"))?;
        let (kw, kpos) = bitems
            .first()
            .and_then(|i| i.as_sym())
            .ok_or_else(|| syntax(bpos, "expected a block keyword"))?;
        let kw_lower = kw.to_ascii_lowercase();
        match kw_lower.as_str() {
            ":requirements" => {
                for r in &bitems[1..] {
                    let (req, rpos) = r
                        .as_sym()
                        .ok_or_else(|| syntax(r.pos(), "expected a requirement flag"))?;
                    let req_lower = req.to_ascii_lowercase();
                    if !SUPPORTED_REQUIREMENTS.contains(&req_lower.as_str()) {
                        return Err(TaskError::UnsupportedFeature {
                            line: rpos.line,
                            col: rpos.col,
                            feature: req_lower,
                        });
                    }
                    if req_lower == ":typing" {
                        typing_declared = true;
                    }
                    if req_lower == ":action-costs" {
                        domain.action_costs = true;
                    }
                }
            }
            ":types" => {
                for (ty, parent, tpos) in parse_typed_list(&bitems[1..], "object")? {
                    if parent != "object" {
                        return Err(TaskError::UnsupportedFeature {
                            line: tpos.line,
                            col: tpos.col,
                            feature: "type hierarchy (types must derive from object)".to_string(),
                        });
                    }
                    if !domain.types.contains(&ty) {
                        domain.types.push(ty);
                    }
                }
            }
            ":predicates" => {
                for p in &bitems[1..] {
                    let (pitems, ppos) = p
                        .as_list()
                        .ok_or_else(|| syntax(p.pos(), "expected a predicate declaration"))?;
                    let (pname, _) = pitems
                        .first()
                        .and_then(|i| i.as_sym())
                        .ok_or_else(|| syntax(ppos, "expected a predicate name"))?;
                    // Count variables only; `- type` annotations on predicate
                    // parameters are accepted and used purely for arity.
                    let arity = parse_typed_list(&pitems[1..], "object")?.len();
                    check_arity(&mut domain.predicates, pname, arity, ppos)?;
                }
            }
            ":action" => {
                let schema = parse_action(bitems, bpos, &mut domain)?;
                domain.schemas.push(schema);
            }
            ":constants" | ":functions" | ":axioms" | ":derived" => {
                return Err(TaskError::UnsupportedFeature {
                    line: kpos.line,
                    col: kpos.col,
                    feature: kw_lower,
                })
            }
            _ => {
                return Err(TaskError::UnsupportedFeature {
                    line: kpos.line,
                    col: kpos.col,
                    feature: kw_lower,
                })
            }
        }
    }

    // Flat typing is usable without the flag when no types were declared:
    // parameters then fall back to the universal type.
    let _ = typing_declared;
    Ok(domain)
}

fn parse_action(items: &[Sexpr], pos: Pos, domain: &mut Domain) -> Result<ActionSchema, TaskError> {
    let (name, _) = items
        .get(1)
        .and_then(|i| i.as_sym())
        .ok_or_else(|| syntax(pos, "expected an action name"))?;
    let mut params: Vec<(String, String)> = Vec::new();
    let mut param_types: BTreeMap<String, String> = BTreeMap::new();
    let mut preconditions = BTreeSet::new();
    let mut add_effects = BTreeSet::new();
    let mut del_effects = BTreeSet::new();
    let mut cost = 1u64;
    let mut saw_effect = false;

    let mut i = 2;
    while i < items.len() {
        let (kw, kpos) = items[i]
            .as_sym()
            .ok_or_else(|| syntax(items[i].pos(), "expected :parameters, :precondition, :effect or :cost"))?;
        let value = items
            .get(i + 1)
            .ok_or_else(|| syntax(kpos, format!("{kw} needs a value")))?;
        let kw_lower = kw.to_ascii_lowercase();
        match kw_lower.as_str() {
            ":parameters" => {
                let (pitems, _) = value
                    .as_list()
                    .ok_or_else(|| syntax(value.pos(), "expected a parameter list"))?;
                for (var, ty, vpos) in parse_typed_list(pitems, "object")? {
                    if !var.starts_with('?') {
                        return Err(syntax(vpos, format!("parameter {var} must start with ?")));
                    }
                    if !domain.types.is_empty() && ty != "object" && !domain.types.contains(&ty) {
                        return Err(TaskError::UnknownType {
                            line: vpos.line,
                            col: vpos.col,
                            name: ty,
                        });
                    }
                    param_types.insert(var.clone(), ty.clone());
                    params.push((var, ty));
                }
            }
            ":precondition" => {
                for (atom_items, apos, negated) in parse_conjunction(value, false, "precondition")? {
                    debug_assert!(!negated);
                    let atom =
                        parse_schema_atom(atom_items, apos, name, &param_types, &mut domain.predicates)?;
                    preconditions.insert(atom);
                }
            }
            ":effect" => {
                saw_effect = true;
                for (atom_items, apos, negated) in parse_conjunction(value, true, "effect")? {
                    let atom =
                        parse_schema_atom(atom_items, apos, name, &param_types, &mut domain.predicates)?;
                    if negated {
                        del_effects.insert(atom);
                    } else {
                        add_effects.insert(atom);
                    }
                }
                if add_effects.intersection(&del_effects).next().is_some() {
                    return Err(TaskError::ConflictingEffects {
                        line: kpos.line,
                        col: kpos.col,
                        action: name.to_string(),
                    });
                }
            }
            ":cost" => {
                if !domain.action_costs {
                    return Err(TaskError::UnsupportedFeature {
                        line: kpos.line,
                        col: kpos.col,
                        feature: ":cost without :action-costs in :requirements".to_string(),
                    });
                }
                let (c, cpos) = value
                    .as_sym()
                    .ok_or_else(|| syntax(value.pos(), "expected a cost value"))?;
                cost = c.parse::<u64>().map_err(|_| {
                    syntax(cpos, format!("cost must be a non-negative integer, found {c}"))
                })?;
            }
            _ => {
                return Err(TaskError::UnsupportedFeature {
                    line: kpos.line,
                    col: kpos.col,
                    feature: format!("{kw_lower} in :action"),
                })
            }
        }
        i += 2;
    }
    if !saw_effect {
        return Err(syntax(pos, format!("action {name} has no :effect")));
    }
    Ok(ActionSchema {
        name: name.to_string(),
        params,
        preconditions,
        add_effects,
        del_effects,
        cost,
    })
}

/// Parse a ground atom from `(:init ...)` or `(:goal ...)`.
fn parse_ground_atom(
    items: &[Sexpr],
    pos: Pos,
    objects: &BTreeMap<String, String>,
    predicates: &mut BTreeMap<String, usize>,
) -> Result<Predicate, TaskError> {
    let (name, npos) = items
        .first()
        .and_then(|i| i.as_sym())
        .ok_or_else(|| syntax(pos, "expected a predicate"))?;
    let mut args = Vec::new();
    for item in &items[1..] {
        let (sym, spos) = item
            .as_sym()
            .ok_or_else(|| syntax(item.pos(), "expected an object name"))?;
        if sym.starts_with('?') {
            return Err(syntax(spos, format!("variables are not allowed here: {sym}")));
        }
        if !objects.contains_key(sym) {
            return Err(TaskError::UnknownObject {
                line: spos.line,
                col: spos.col,
                name: sym.to_string(),
            });
        }
        args.push(sym.to_string());
    }
    check_arity(predicates, name, args.len(), npos)?;
    Ok(Predicate {
        name: name.to_string(),
        args,
    })
}

/// Parse a `(define (problem ...))` file against an already-parsed domain.
pub fn parse_problem(domain: &Domain, text: &str) -> Result<Task, TaskError> {
    let top = read_sexpr(text)?;
    let (items, pos) = top.as_list().ok_or_else(|| syntax(top.pos(), "expected (define ...)"))?;
    match items.first().and_then(|i| i.as_sym()) {
        Some((h, _)) if keyword_eq(h, "define") => {}
        _ => return Err(syntax(pos, "expected (define (problem ...) ...)")),
    }
    let (head, hpos) = items
        .get(1)
        .and_then(|i| i.as_list())
        .ok_or_else(|| syntax(pos, "expected (problem NAME)"))?;
    let problem_name = match (
        head.first().and_then(|i| i.as_sym()),
        head.get(1).and_then(|i| i.as_sym()),
    ) {
        (Some((kw, _)), Some((n, _))) if keyword_eq(kw, "problem") => n.to_string(),
        _ => return Err(syntax(hpos, "expected (problem NAME)")),
    };

    let mut task = Task {
        domain_name: domain.name.clone(),
        problem_name,
        types: domain.types.clone(),
        objects: BTreeMap::new(),
        predicates: domain.predicates.clone(),
        schemas: domain.schemas.clone(),
        init: State::new(),
        goal: BTreeSet::new(),
        actions: Vec::new(),
    };
    let mut saw_goal = false;

    for block in &items[2..] {
        let (bitems, bpos) = block.as_list().ok_or_else(|| syntax(block.pos(), "expected a (:...) block"))?;
        let (kw, kpos) = bitems
            .first()
            .and_then(|i| i.as_sym())
            .ok_or_else(|| syntax(bpos, "expected a block keyword"))?;
        let kw_lower = kw.to_ascii_lowercase();
        match kw_lower.as_str() {
            ":domain" => {
                let (dname, _) = bitems
                    .get(1)
                    .and_then(|i| i.as_sym())
                    .ok_or_else(|| syntax(bpos, "expected a domain name"))?;
                if dname != domain.name {
                    return Err(TaskError::DomainMismatch {
                        expected: domain.name.clone(),
                        found: dname.to_string(),
                    });
                }
            }
            ":objects" => {
                for (obj, ty, opos) in parse_typed_list(&bitems[1..], "object")? {
                    if !task.types.is_empty() && ty != "object" && !task.types.contains(&ty) {
                        return Err(TaskError::UnknownType {
                            line: opos.line,
                            col: opos.col,
                            name: ty,
                        });
                    }
                    task.objects.insert(obj, ty);
                }
            }
            ":init" => {
                for atom in &bitems[1..] {
                    let (aitems, apos) = atom
                        .as_list()
                        .ok_or_else(|| syntax(atom.pos(), "expected an atom in :init"))?;
                    if let Some((h, hpos)) = aitems.first().and_then(|i| i.as_sym()) {
                        if keyword_eq(h, "=") {
                            return Err(TaskError::UnsupportedFeature {
                                line: hpos.line,
                                col: hpos.col,
                                feature: "numeric fluents in :init".to_string(),
                            });
                        }
                    }
                    let p = parse_ground_atom(aitems, apos, &task.objects, &mut task.predicates)?;
                    task.init.insert(p);
                }
            }
            ":goal" => {
                saw_goal = true;
                let value = bitems
                    .get(1)
                    .ok_or_else(|| syntax(kpos, ":goal needs a formula"))?;
                for (atom_items, apos, negated) in parse_conjunction(value, false, "goal")? {
                    debug_assert!(!negated);
                    let p = parse_ground_atom(atom_items, apos, &task.objects, &mut task.predicates)?;
                    task.goal.insert(p);
                }
            }
            ":metric" => {
                return Err(TaskError::UnsupportedFeature {
                    line: kpos.line,
                    col: kpos.col,
                    feature: ":metric".to_string(),
                })
            }
            _ => {
                return Err(TaskError::UnsupportedFeature {
                    line: kpos.line,
                    col: kpos.col,
                    feature: kw_lower,
                })
            }
        }
    }

    if !saw_goal || task.goal.is_empty() {
        return Err(TaskError::EmptyGoal);
    }
    Ok(task)
}

/// Parse a domain file and a problem file into an ungrounded [`Task`].
pub fn parse_task(domain_text: &str, problem_text: &str) -> Result<Task, TaskError> {
    let domain = parse_domain(domain_text)?;
    parse_problem(&domain, problem_text)
}
