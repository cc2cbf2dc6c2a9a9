//! Forward state-space search over grounded STRIPS tasks.
//!
//! Three algorithms (breadth-first, A*, greedy best-first) share one
//! expansion core. Determinism is a hard requirement here — attack
//! reproducibility depends on it — so frontier ties are broken by the
//! canonical ordering of states (their sorted predicate sets), or by a
//! seeded hash when a run wants to emulate arbitrary plateau order.

mod heuristics;

pub use heuristics::{h_additive, h_goal_count};

use crate::strips::{Plan, PlanCost, State, Task};
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::rc::Rc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Algorithm {
    Bfs,
    AStar,
    GreedyBestFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Heuristic {
    /// h ≡ 0; A* with this is uniform-cost search.
    Zero,
    /// Delete-relaxed additive cost-to-go. Informative, not admissible.
    Additive,
    /// Number of goal predicates not yet satisfied.
    GoalCount,
}

/// How to order frontier entries whose priority is tied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum TieBreak {
    /// Smallest state in canonical (sorted predicate set) order.
    Canonical,
    /// Deterministic pseudo-random order derived from the seed.
    Seeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    pub heuristic: Heuristic,
    /// Expansion budget; exceeding it is reported as `BudgetExhausted`,
    /// never as unsolvability.
    pub node_budget: u64,
    pub tie_break: TieBreak,
}

impl SearchConfig {
    /// Optimal search: uniform-cost (A* with the zero heuristic).
    pub fn optimal() -> Self {
        SearchConfig {
            algorithm: Algorithm::AStar,
            heuristic: Heuristic::Zero,
            node_budget: 1_000_000,
            tie_break: TieBreak::Canonical,
        }
    }

    /// Satisficing search in the style of a greedy planner.
    pub fn greedy_additive() -> Self {
        SearchConfig {
            algorithm: Algorithm::GreedyBestFirst,
            heuristic: Heuristic::Additive,
            node_budget: 1_000_000,
            tie_break: TieBreak::Canonical,
        }
    }

    pub fn with_budget(mut self, node_budget: u64) -> Self {
        self.node_budget = node_budget;
        self
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    /// Short stable name for reports, e.g. `astar+zero`.
    pub fn label(&self) -> String {
        let alg = match self.algorithm {
            Algorithm::Bfs => "bfs",
            Algorithm::AStar => "astar",
            Algorithm::GreedyBestFirst => "greedy",
        };
        let h = match self.heuristic {
            Heuristic::Zero => "zero",
            Heuristic::Additive => "additive",
            Heuristic::GoalCount => "goal-count",
        };
        format!("{alg}+{h}")
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig::optimal()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Plan(Plan),
    /// The reachable space was exhausted without meeting the goal.
    Unsolvable,
    /// The node budget ran out first; solvability is unknown.
    BudgetExhausted,
}

impl SearchOutcome {
    pub fn cost(&self) -> Option<PlanCost> {
        match self {
            SearchOutcome::Plan(p) => Some(PlanCost::Finite(p.total_cost)),
            SearchOutcome::Unsolvable => Some(PlanCost::Infinite),
            SearchOutcome::BudgetExhausted => None,
        }
    }

    pub fn plan(&self) -> Option<&Plan> {
        match self {
            SearchOutcome::Plan(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub expanded: u64,
    pub generated: u64,
}

pub(crate) fn evaluate(h: Heuristic, state: &State, task: &Task) -> PlanCost {
    match h {
        Heuristic::Zero => PlanCost::Finite(0),
        Heuristic::GoalCount => PlanCost::Finite(h_goal_count(state, &task.goal)),
        Heuristic::Additive => h_additive(state, task),
    }
}

/// splitmix64; used to derive seeded tie-break keys from state hashes.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

pub(crate) fn tie_key(tie: TieBreak, state: &State) -> u64 {
    match tie {
        TieBreak::Canonical => 0,
        TieBreak::Seeded(seed) => {
            use std::hash::{Hash, Hasher};
            let mut h = std::collections::hash_map::DefaultHasher::new();
            state.hash(&mut h);
            mix(h.finish() ^ seed)
        }
    }
}

struct NodeInfo {
    g: u64,
    parent: Option<(Rc<State>, usize)>,
    closed: bool,
    /// Cached heuristic value (finite by construction: infinite-h states
    /// are pruned before insertion).
    h: u64,
}

/// Solve `task` with the given configuration. The task must be grounded.
pub fn solve(task: &Task, config: &SearchConfig) -> SearchResult {
    match config.algorithm {
        Algorithm::Bfs => bfs(task, config),
        Algorithm::AStar | Algorithm::GreedyBestFirst => best_first(task, config),
    }
}

fn reconstruct(task: &Task, info: &HashMap<Rc<State>, NodeInfo>, goal: &Rc<State>) -> Plan {
    let mut actions = Vec::new();
    let mut cur = goal.clone();
    while let Some((parent, action_idx)) = info.get(&cur).and_then(|n| n.parent.clone()) {
        actions.push(task.actions[action_idx].clone());
        cur = parent;
    }
    actions.reverse();
    Plan::new(actions)
}

fn bfs(task: &Task, config: &SearchConfig) -> SearchResult {
    let start = Rc::new(task.init.clone());
    let mut info: HashMap<Rc<State>, NodeInfo> = HashMap::new();
    info.insert(start.clone(), NodeInfo { g: 0, parent: None, closed: false, h: 0 });
    let mut queue = VecDeque::new();
    queue.push_back(start);
    let mut expanded = 0u64;
    let mut generated = 0u64;

    while let Some(state) = queue.pop_front() {
        if task.is_goal(&state) {
            return SearchResult {
                outcome: SearchOutcome::Plan(reconstruct(task, &info, &state)),
                expanded,
                generated,
            };
        }
        if expanded >= config.node_budget {
            return SearchResult { outcome: SearchOutcome::BudgetExhausted, expanded, generated };
        }
        expanded += 1;
        let g = info[&state].g;
        for (idx, action) in task.actions.iter().enumerate() {
            if !action.applicable(&state) {
                continue;
            }
            let next = Rc::new(crate::strips::apply_action(&state, action).expect("checked applicable"));
            generated += 1;
            if !info.contains_key(&next) {
                info.insert(
                    next.clone(),
                    NodeInfo { g: g + action.cost, parent: Some((state.clone(), idx)), closed: false, h: 0 },
                );
                queue.push_back(next);
            }
        }
    }
    SearchResult { outcome: SearchOutcome::Unsolvable, expanded, generated }
}

/// Shared core for A* (priority g+h) and greedy best-first (priority h).
fn best_first(task: &Task, config: &SearchConfig) -> SearchResult {
    let greedy = config.algorithm == Algorithm::GreedyBestFirst;
    let start = Rc::new(task.init.clone());
    let mut expanded = 0u64;
    let mut generated = 0u64;

    let start_h = match evaluate(config.heuristic, &start, task) {
        PlanCost::Finite(h) => h,
        PlanCost::Infinite => {
            return SearchResult { outcome: SearchOutcome::Unsolvable, expanded, generated }
        }
    };

    let mut info: HashMap<Rc<State>, NodeInfo> = HashMap::new();
    info.insert(start.clone(), NodeInfo { g: 0, parent: None, closed: false, h: start_h });

    // Ordered frontier: (priority, tie key, state). Entries are removed
    // eagerly on improvement, so the set never holds stale duplicates.
    let mut open: BTreeSet<(u64, u64, Rc<State>)> = BTreeSet::new();
    // g(start) = 0, so both priorities start at h.
    open.insert((start_h, tie_key(config.tie_break, &start), start));

    while let Some((_, _, state)) = open.pop_first() {
        if task.is_goal(&state) {
            return SearchResult {
                outcome: SearchOutcome::Plan(reconstruct(task, &info, &state)),
                expanded,
                generated,
            };
        }
        if expanded >= config.node_budget {
            return SearchResult { outcome: SearchOutcome::BudgetExhausted, expanded, generated };
        }
        expanded += 1;
        info.get_mut(&state).expect("open states are tracked").closed = true;
        let g = info[&state].g;

        for (idx, action) in task.actions.iter().enumerate() {
            if !action.applicable(&state) {
                continue;
            }
            let next = Rc::new(crate::strips::apply_action(&state, action).expect("checked applicable"));
            generated += 1;
            let next_g = g + action.cost;

            let (known_h, improves, was_open) = match info.get(&next) {
                None => (None, true, false),
                Some(old) => (Some(old.h), next_g < old.g, !old.closed),
            };
            if !improves {
                continue;
            }
            // In greedy mode a closed state is final: the first expansion
            // wins and later, cheaper paths to it are ignored. A* reopens
            // (the additive heuristic is not admissible, so a closed node
            // can be reached more cheaply later).
            if greedy && known_h.is_some() && !was_open {
                continue;
            }
            let h = match known_h {
                Some(h) => h,
                None => match evaluate(config.heuristic, &next, task) {
                    PlanCost::Finite(h) => h,
                    // Unreachable even under delete relaxation: prune.
                    PlanCost::Infinite => continue,
                },
            };
            let priority = if greedy { h } else { next_g + h };
            if let Some(old) = info.get(&next) {
                let old_priority = if greedy { old.h } else { old.g + old.h };
                open.remove(&(old_priority, tie_key(config.tie_break, &next), next.clone()));
            }
            info.insert(
                next.clone(),
                NodeInfo { g: next_g, parent: Some((state.clone(), idx)), closed: false, h },
            );
            open.insert((priority, tie_key(config.tie_break, &next), next));
        }
    }
    SearchResult { outcome: SearchOutcome::Unsolvable, expanded, generated }
}
