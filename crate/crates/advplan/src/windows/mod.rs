//! Local views of the search space paired with a known-harmful change,
//! plus frequency tables of such views.
//!
//! Two flavors exist. A [`GridWindow`] is an n×n occupancy mask around a
//! cell together with the direction the agent approached from; the
//! associated change is a wall at the center. A [`StripsWindow`] is a run
//! of n consecutive states joined by n−1 actions; the associated change
//! is removing the last action. Both flavors carry an equivalence
//! relation that ignores incidental naming: grids match up to quarter
//! rotations (mask and approach rotated together), STRIPS windows match
//! up to a type-preserving renaming of objects over identical schema
//! sequences. Tables deduplicate by equivalence and count occurrences.

mod table;

pub use table::{
    build_grid_table, build_strips_table, GridTableConfig, StripsTableConfig, TableError,
    TableMeta, TableWindow, WindowTable,
};
pub(crate) use table::instance_seed;

use crate::grid::{Cell, Dir, Grid};
use crate::strips::{GroundedAction, Predicate, State, Task};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// n×n wall mask around a location, with the agent's incoming direction.
/// `mask[r*n + c]` is true for walls; out-of-bounds cells are encoded as
/// walls at extraction time. The adversarial change is a wall at the
/// center, so the center is always free in a stored window.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridWindow {
    n: usize,
    mask: Vec<bool>,
    approach: Dir,
}

impl GridWindow {
    pub fn new(n: usize, mask: Vec<bool>, approach: Dir) -> GridWindow {
        assert!(n % 2 == 1 && n >= 3, "window size must be odd and ≥ 3");
        assert_eq!(mask.len(), n * n, "mask must be n×n");
        assert!(!mask[(n / 2) * n + n / 2], "window center must be free");
        GridWindow { n, mask, approach }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn approach(&self) -> Dir {
        self.approach
    }

    pub fn is_wall(&self, r: usize, c: usize) -> bool {
        self.mask[r * self.n + c]
    }

    /// Quarter turn clockwise of both the mask and the approach.
    pub fn rotate_cw(&self) -> GridWindow {
        let n = self.n;
        let mut mask = vec![false; n * n];
        for r in 0..n {
            for c in 0..n {
                mask[r * n + c] = self.mask[(n - 1 - c) * n + r];
            }
        }
        GridWindow { n, mask, approach: self.approach.rotate_cw() }
    }

    /// The representative of this window's equivalence class: the
    /// lexicographically smallest of its four rotations.
    pub fn canonical(&self) -> GridWindow {
        let mut best = self.clone();
        let mut cur = self.clone();
        for _ in 0..3 {
            cur = cur.rotate_cw();
            if cur < best {
                best = cur.clone();
            }
        }
        best
    }

    /// Stable text key of the canonical form; equal keys ⇔ equivalent
    /// windows.
    pub fn canonical_key(&self) -> String {
        self.canonical().render()
    }

    fn render(&self) -> String {
        let mut out = format!("approach {}\n", self.approach.name());
        for r in 0..self.n {
            for c in 0..self.n {
                out.push(if self.is_wall(r, c) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for GridWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Cut an n×n window out of `grid` around `center`. Cells outside the
/// grid count as walls. `approach` is the direction the agent moves (or
/// is predicted to move) when entering the center cell.
pub fn extract_grid_window(grid: &Grid, center: Cell, n: usize, approach: Dir) -> GridWindow {
    assert!(n % 2 == 1 && n >= 3, "window size must be odd and ≥ 3");
    assert!(grid.in_bounds(center), "window center out of bounds: {center}");
    assert!(grid.is_free(center), "window center must be free: {center}");
    let half = (n / 2) as i32;
    let mut mask = Vec::with_capacity(n * n);
    for dr in -half..=half {
        for dc in -half..=half {
            mask.push(grid.is_wall(Cell::new(center.row + dr, center.col + dc)));
        }
    }
    GridWindow { n, mask, approach }
}

/// True with the quarter-turn count (0..=3) when some rotation maps `a`
/// onto `b` — mask and approach together.
pub fn grid_windows_equivalent(a: &GridWindow, b: &GridWindow) -> Option<u8> {
    if a.n != b.n {
        return None;
    }
    let mut cur = a.clone();
    for turns in 0..4u8 {
        if cur == *b {
            return Some(turns);
        }
        cur = cur.rotate_cw();
    }
    None
}

/// One action inside a STRIPS window: schema name plus bound objects.
/// The full precondition/effect sets are recoverable from the domain, so
/// windows carry only what equivalence needs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WindowAction {
    pub schema: String,
    pub args: Vec<String>,
}

impl WindowAction {
    pub fn of(action: &GroundedAction) -> WindowAction {
        WindowAction { schema: action.schema.clone(), args: action.binding.clone() }
    }

    pub fn text(&self) -> String {
        if self.args.is_empty() {
            format!("({})", self.schema)
        } else {
            format!("({} {})", self.schema, self.args.join(" "))
        }
    }
}

/// A run of n states joined by n−1 actions; the adversarial change is
/// the removal of the last action. `obj_types` maps every object
/// mentioned in the window to its declared type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripsWindow {
    pub states: Vec<State>,
    pub actions: Vec<WindowAction>,
    pub obj_types: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WindowError {
    TrajectoryTooShort { states: usize, needed: usize },
    BadSize { n: usize },
}

impl fmt::Display for WindowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowError::TrajectoryTooShort { states, needed } => {
                write!(f, "trajectory has {states} states, window needs {needed}")
            }
            WindowError::BadSize { n } => write!(f, "window size {n} invalid, need n ≥ 2"),
        }
    }
}

impl std::error::Error for WindowError {}

impl StripsWindow {
    /// All objects mentioned anywhere in the window.
    pub fn objects(&self) -> BTreeSet<&str> {
        let mut out: BTreeSet<&str> = BTreeSet::new();
        for a in &self.actions {
            out.extend(a.args.iter().map(String::as_str));
        }
        for s in &self.states {
            for p in s.iter() {
                out.extend(p.args.iter().map(String::as_str));
            }
        }
        out
    }

    /// The action whose removal is this window's adversarial change.
    pub fn change(&self) -> &WindowAction {
        self.actions.last().expect("windows have at least one action")
    }

    /// Declared type of an object, defaulting to `object`.
    pub fn type_of(&self, obj: &str) -> &str {
        self.obj_types.get(obj).map(String::as_str).unwrap_or("object")
    }

    /// Apply an object renaming to every state, action, and type entry.
    /// Objects missing from the map keep their name.
    pub fn rename(&self, f: &BTreeMap<String, String>) -> StripsWindow {
        let m = |o: &String| f.get(o).cloned().unwrap_or_else(|| o.clone());
        StripsWindow {
            states: self
                .states
                .iter()
                .map(|s| {
                    State::from_predicates(s.iter().map(|p| Predicate {
                        name: p.name.clone(),
                        args: p.args.iter().map(&m).collect(),
                    }))
                })
                .collect(),
            actions: self
                .actions
                .iter()
                .map(|a| WindowAction {
                    schema: a.schema.clone(),
                    args: a.args.iter().map(&m).collect(),
                })
                .collect(),
            obj_types: self
                .obj_types
                .iter()
                .map(|(o, t)| (m(o), t.clone()))
                .collect(),
        }
    }

    /// Drop `obj_types` entries for objects no longer mentioned.
    fn prune_types(mut self) -> StripsWindow {
        let used: BTreeSet<String> = self.objects().iter().map(|s| s.to_string()).collect();
        self.obj_types.retain(|o, _| used.contains(o));
        self
    }

    /// The representative of this window's equivalence class: objects are
    /// renamed to v1, v2, … in first-occurrence order over the actions;
    /// objects appearing only in states (possible only through schema
    /// constants) get the remaining indices, choosing the assignment with
    /// the smallest rendering.
    pub fn canonical(&self) -> StripsWindow {
        // Untyped objects default to the root type so hand-built and
        // extracted windows canonicalize identically.
        if self.objects().iter().any(|o| !self.obj_types.contains_key(*o)) {
            let mut filled = self.clone();
            for o in self.objects() {
                filled
                    .obj_types
                    .entry(o.to_string())
                    .or_insert_with(|| "object".to_string());
            }
            return filled.canonical();
        }
        let mut order: Vec<String> = Vec::new();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for a in &self.actions {
            for o in &a.args {
                if seen.insert(o) {
                    order.push(o.clone());
                }
            }
        }
        let leftovers: Vec<String> = self
            .objects()
            .into_iter()
            .filter(|o| !seen.contains(o))
            .map(str::to_string)
            .collect();

        let base: BTreeMap<String, String> = order
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), format!("v{}", i + 1)))
            .collect();

        if leftovers.is_empty() {
            return self.rename(&base).prune_types();
        }

        // Rare path: exact canonicalization of state-only objects by
        // minimizing over their permutations. Leftover counts are tiny in
        // practice (they require constant objects in action schemas).
        let mut best: Option<(String, StripsWindow)> = None;
        let mut perm: Vec<usize> = (0..leftovers.len()).collect();
        loop {
            let mut f = base.clone();
            for (slot, &which) in perm.iter().enumerate() {
                f.insert(leftovers[which].clone(), format!("v{}", order.len() + slot + 1));
            }
            let cand = self.rename(&f).prune_types();
            let key = cand.render();
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, cand));
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        best.unwrap().1
    }

    /// Stable text key of the canonical form; equal keys ⇔ equivalent
    /// windows.
    pub fn canonical_key(&self) -> String {
        self.canonical().render()
    }

    fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("objects");
        for (o, t) in &self.obj_types {
            out.push_str(&format!(" {o}:{t}"));
        }
        out.push('\n');
        for a in &self.actions {
            out.push_str(&format!("action {}\n", a.text()));
        }
        for s in &self.states {
            out.push_str("state");
            for p in s.iter() {
                out.push_str(&format!(" {p}"));
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for StripsWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Cut a window of `n` states (and `n − 1` actions) out of a trajectory,
/// ending with the action at `end_index`. `states` must hold one more
/// entry than `actions`; the window spans actions
/// `end_index − n + 2 ..= end_index`.
pub fn extract_strips_window(
    states: &[State],
    actions: &[GroundedAction],
    end_index: usize,
    n: usize,
    task: &Task,
) -> Result<StripsWindow, WindowError> {
    if n < 2 {
        return Err(WindowError::BadSize { n });
    }
    assert_eq!(states.len(), actions.len() + 1, "trajectory shape mismatch");
    assert!(end_index < actions.len(), "end_index beyond trajectory");
    if end_index + 2 < n {
        return Err(WindowError::TrajectoryTooShort { states: end_index + 2, needed: n });
    }
    let first = end_index + 2 - n;
    let win_states: Vec<State> = states[first..=end_index + 1].to_vec();
    let win_actions: Vec<WindowAction> =
        actions[first..=end_index].iter().map(WindowAction::of).collect();
    let mut obj_types = BTreeMap::new();
    let mut w = StripsWindow { states: win_states, actions: win_actions, obj_types: BTreeMap::new() };
    for o in w.objects() {
        let t = task.objects.get(o).cloned().unwrap_or_else(|| "object".to_string());
        obj_types.insert(o.to_string(), t);
    }
    w.obj_types = obj_types;
    Ok(w)
}

/// Remove the predicates shared by all states of the window: with
/// Δ = ∩ᵢ Sᵢ, every state becomes Sᵢ ∖ Δ. Idempotent; actions are
/// untouched; type entries for objects that vanish are pruned.
pub fn normalize_window(w: &StripsWindow) -> StripsWindow {
    let mut delta: Option<BTreeSet<Predicate>> = None;
    for s in &w.states {
        let set: BTreeSet<Predicate> = s.iter().cloned().collect();
        delta = Some(match delta {
            None => set,
            Some(d) => d.intersection(&set).cloned().collect(),
        });
    }
    let delta = delta.unwrap_or_default();
    StripsWindow {
        states: w
            .states
            .iter()
            .map(|s| State::from_predicates(s.iter().filter(|p| !delta.contains(p)).cloned()))
            .collect(),
        actions: w.actions.clone(),
        obj_types: w.obj_types.clone(),
    }
    .prune_types()
}

/// True with a witness renaming `f` (mapping `b`'s objects to `a`'s,
/// so that renaming `b` yields `a`) when the windows are equivalent:
/// same schema sequence and a type-preserving object bijection aligning
/// every action and state.
pub fn strips_windows_equivalent(
    a: &StripsWindow,
    b: &StripsWindow,
) -> Option<BTreeMap<String, String>> {
    if a.states.len() != b.states.len() || a.actions.len() != b.actions.len() {
        return None;
    }
    for (x, y) in a.actions.iter().zip(&b.actions) {
        if x.schema != y.schema || x.args.len() != y.args.len() {
            return None;
        }
    }
    let ca = a.canonical();
    let cb = b.canonical();
    if ca.render() != cb.render() {
        return None;
    }
    // Compose the two canonical renamings: b-object → vᵢ → a-object.
    let to_v_a = canonical_map(a, &ca);
    let to_v_b = canonical_map(b, &cb);
    let from_v_a: BTreeMap<&String, &String> = to_v_a.iter().map(|(o, v)| (v, o)).collect();
    let witness: BTreeMap<String, String> = to_v_b
        .iter()
        .map(|(o, v)| (o.clone(), (*from_v_a.get(v).expect("equal canonical forms")).clone()))
        .collect();
    debug_assert_eq!(
        b.rename(&witness).prune_types().render(),
        a.clone().prune_types().render(),
        "witness must map b exactly onto a"
    );
    Some(witness)
}

/// Recover the renaming a window's canonicalization applied, by pairing
/// original and canonical objects in their forced occurrence order.
fn canonical_map(w: &StripsWindow, canon: &StripsWindow) -> BTreeMap<String, String> {
    // Mirror canonical()'s type fill so the rendering comparison below
    // sees the same object lines.
    if w.objects().iter().any(|o| !w.obj_types.contains_key(*o)) {
        let mut filled = w.clone();
        for o in w.objects() {
            filled.obj_types.entry(o.to_string()).or_insert_with(|| "object".to_string());
        }
        return canonical_map(&filled, canon);
    }
    let mut map = BTreeMap::new();
    for (orig, renamed) in w.actions.iter().zip(&canon.actions) {
        for (o, v) in orig.args.iter().zip(&renamed.args) {
            map.insert(o.clone(), v.clone());
        }
    }
    if map.len() < canon.obj_types.len() {
        // Leftover objects: recover their assignment by replaying the
        // canonical choice — rename with every extension and keep the one
        // that reproduces the canonical rendering.
        let assigned: BTreeSet<&String> = map.keys().collect();
        let leftovers: Vec<String> = w
            .objects()
            .into_iter()
            .map(str::to_string)
            .filter(|o| !assigned.contains(o))
            .collect();
        let free_vs: Vec<String> = (map.len() + 1..=map.len() + leftovers.len())
            .map(|i| format!("v{i}"))
            .collect();
        let mut perm: Vec<usize> = (0..leftovers.len()).collect();
        loop {
            let mut f = map.clone();
            for (slot, &which) in perm.iter().enumerate() {
                f.insert(leftovers[which].clone(), free_vs[slot].clone());
            }
            if w.rename(&f).prune_types().render() == canon.render() {
                return f;
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        unreachable!("canonical form must be reproducible");
    }
    map
}

#[cfg(test)]
mod tests;
