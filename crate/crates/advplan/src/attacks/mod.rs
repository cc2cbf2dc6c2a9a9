//! The adversary's side: threat-model configurations, a brute-force
//! interdiction oracle, next-state prediction, and the table-driven
//! attacks — offline (action removal before planning) in [`offline`],
//! online (walls dropped mid-run) in [`online`].

mod offline;
mod online;

pub use offline::offline_attack;
pub use online::{online_attack, SenseMode, TickEvent, Transcript};

use crate::grid::{astar_cost, Cell, Grid, GridHeuristic};
use crate::planner::{evaluate, solve, Heuristic, SearchConfig};
use crate::strips::{apply_action, PlanCost, State, Task};
use crate::util::{for_each_subset, subset_count};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// When the adversary acts: before planning starts, or during execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Online,
    Offline,
}

/// What the adversary knows about the victim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Knowledge {
    /// Knows the agent's heuristic and reads its actual next move.
    AgentHeuristicAndInformed,
    /// Knows the agent's heuristic; must predict the next move.
    AgentHeuristic,
    /// Knows only the current state and the goal.
    BlackBox,
}

/// The heuristic the adversary runs, per flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeuristicSpec {
    Grid(GridHeuristic),
    Strips(Heuristic),
}

/// Budgets above this are rejected everywhere.
pub const MAX_BUDGET: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThreatError {
    InformedRequiresOnline,
    BudgetTooLarge { budget: u32 },
}

impl fmt::Display for ThreatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThreatError::InformedRequiresOnline => {
                write!(f, "the informed adversary only exists online")
            }
            ThreatError::BudgetTooLarge { budget } => {
                write!(f, "budget {budget} exceeds the maximum of {MAX_BUDGET}")
            }
        }
    }
}

impl std::error::Error for ThreatError {}

/// A fully specified adversary: timing, knowledge, heuristic, and the
/// number of changes it may apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreatModel {
    pub mode: Mode,
    pub knowledge: Knowledge,
    pub h_adv: HeuristicSpec,
    pub budget: u32,
}

impl ThreatModel {
    /// Online adversary that reads the agent's queued move.
    pub fn informed_online(budget: u32) -> ThreatModel {
        ThreatModel {
            mode: Mode::Online,
            knowledge: Knowledge::AgentHeuristicAndInformed,
            h_adv: HeuristicSpec::Grid(GridHeuristic::Euclidean),
            budget,
        }
    }

    /// Online adversary predicting moves with the agent's own heuristic.
    pub fn agent_heuristic_online(budget: u32, h: GridHeuristic) -> ThreatModel {
        ThreatModel {
            mode: Mode::Online,
            knowledge: Knowledge::AgentHeuristic,
            h_adv: HeuristicSpec::Grid(h),
            budget,
        }
    }

    /// Online adversary predicting with its own (Manhattan) heuristic.
    pub fn black_box_online(budget: u32) -> ThreatModel {
        ThreatModel {
            mode: Mode::Online,
            knowledge: Knowledge::BlackBox,
            h_adv: HeuristicSpec::Grid(GridHeuristic::Manhattan),
            budget,
        }
    }

    /// Offline adversary sharing the agent's search heuristic.
    pub fn agent_heuristic_offline(budget: u32, h: Heuristic) -> ThreatModel {
        ThreatModel {
            mode: Mode::Offline,
            knowledge: Knowledge::AgentHeuristic,
            h_adv: HeuristicSpec::Strips(h),
            budget,
        }
    }

    /// Offline adversary with no knowledge of the agent's planner.
    pub fn black_box_offline(budget: u32) -> ThreatModel {
        ThreatModel {
            mode: Mode::Offline,
            knowledge: Knowledge::BlackBox,
            h_adv: HeuristicSpec::Strips(Heuristic::Additive),
            budget,
        }
    }

    pub fn validate(&self) -> Result<(), ThreatError> {
        if self.knowledge == Knowledge::AgentHeuristicAndInformed && self.mode != Mode::Online {
            return Err(ThreatError::InformedRequiresOnline);
        }
        if self.budget > MAX_BUDGET {
            return Err(ThreatError::BudgetTooLarge { budget: self.budget });
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        let knowledge = match self.knowledge {
            Knowledge::AgentHeuristicAndInformed => "informed",
            Knowledge::AgentHeuristic => "agent-heuristic",
            Knowledge::BlackBox => "black-box",
        };
        let mode = match self.mode {
            Mode::Online => "online",
            Mode::Offline => "offline",
        };
        format!("{knowledge}-{mode}")
    }
}

/// One applied adversarial change.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Change {
    /// Wall placed at a grid cell.
    Wall(Cell),
    /// Grounded action removed from the task, by index into the task's
    /// action list, with its text for reporting.
    RemoveAction { index: usize, action: String },
}

impl fmt::Display for Change {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Change::Wall(c) => write!(f, "wall {c}"),
            Change::RemoveAction { action, .. } => write!(f, "remove {action}"),
        }
    }
}

/// What an attack did to one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub baseline_cost: PlanCost,
    pub attacked_cost: PlanCost,
    pub removed: Vec<Change>,
    /// attacked > baseline (unsolvable counts as success).
    pub success: bool,
    /// attacked < baseline — possible only with suboptimal agents.
    pub cost_decreased: bool,
    /// Placements skipped as illegal (e.g. on the goal); never charged
    /// against the budget.
    pub illegal_skipped: u64,
    /// Nodes expanded by the adversary's own planner, if it ran one.
    pub adversary_expanded: u64,
    pub adversary_budget_exhausted: bool,
    pub elapsed_ms: f64,
}

impl AttackReport {
    pub fn new(baseline: PlanCost, attacked: PlanCost, removed: Vec<Change>) -> AttackReport {
        AttackReport {
            baseline_cost: baseline,
            attacked_cost: attacked,
            success: attacked > baseline,
            cost_decreased: attacked < baseline,
            removed,
            illegal_skipped: 0,
            adversary_expanded: 0,
            adversary_budget_exhausted: false,
            elapsed_ms: 0.0,
        }
    }

    /// Copy with wall-clock fields zeroed, for determinism comparisons.
    pub fn canonical_record(&self) -> AttackReport {
        AttackReport { elapsed_ms: 0.0, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttackError {
    WrongMode { expected: Mode },
    WrongHeuristicFlavor,
    BaselineUnsolvable,
    AgentBudgetExhausted,
    Threat(ThreatError),
}

impl fmt::Display for AttackError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackError::WrongMode { expected } => {
                write!(f, "threat model must be {expected:?} for this attack")
            }
            AttackError::WrongHeuristicFlavor => {
                write!(f, "threat model heuristic flavor does not fit this attack")
            }
            AttackError::BaselineUnsolvable => write!(f, "baseline instance is unsolvable"),
            AttackError::AgentBudgetExhausted => {
                write!(f, "agent planner exhausted its node budget")
            }
            AttackError::Threat(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for AttackError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteForceError {
    BaselineUnsolvable,
    BoundExceeded { required: u64, bound: u64 },
}

impl fmt::Display for BruteForceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BruteForceError::BaselineUnsolvable => write!(f, "baseline instance is unsolvable"),
            BruteForceError::BoundExceeded { required, bound } => {
                write!(f, "{required} re-solves needed, bound is {bound}")
            }
        }
    }
}

impl std::error::Error for BruteForceError {}

/// Default cap on oracle re-solves.
pub const DEFAULT_RESOLVE_BOUND: u64 = 200_000;

/// Exhaustive interdiction oracle over the baseline plan's actions:
/// try every removal subset of size ≤ k, re-solving each time, and return
/// the subset maximizing the attacked cost (unsolvable beats any finite
/// cost; first subset in enumeration order wins ties).
pub fn brute_force_attack_task(
    task: &Task,
    agent: &SearchConfig,
    k: u32,
    bound: u64,
) -> Result<AttackReport, BruteForceError> {
    let base = solve(task, agent);
    let Some(plan) = base.outcome.plan() else {
        return Err(BruteForceError::BaselineUnsolvable);
    };
    let baseline = PlanCost::Finite(plan.total_cost);

    let mut candidate_set: BTreeSet<usize> = BTreeSet::new();
    for a in &plan.actions {
        let args: Vec<&str> = a.binding.iter().map(String::as_str).collect();
        candidate_set.insert(
            task.find_action(&a.schema, &args)
                .expect("plan actions come from the task"),
        );
    }
    let candidates: Vec<usize> = candidate_set.into_iter().collect();
    let required = subset_count(candidates.len() as u64, k);
    if required > bound {
        return Err(BruteForceError::BoundExceeded { required, bound });
    }

    let mut best_cost = baseline;
    let mut best_subset: Vec<usize> = Vec::new();
    let mut budget_hit = false;
    for_each_subset(&candidates, k, |subset| {
        if subset.is_empty() {
            return true; // removing nothing yields the baseline
        }
        let reduced = task.without_actions(&subset.iter().copied().collect());
        match solve(&reduced, agent).outcome.cost() {
            Some(cost) => {
                if cost > best_cost {
                    best_cost = cost;
                    best_subset = subset.to_vec();
                }
            }
            None => budget_hit = true,
        }
        // Nothing can beat unsolvable; stop early once it's reached.
        best_cost != PlanCost::Infinite
    });

    let removed = best_subset
        .iter()
        .map(|&i| Change::RemoveAction { index: i, action: task.actions[i].text() })
        .collect();
    let mut report = AttackReport::new(baseline, best_cost, removed);
    report.adversary_budget_exhausted = budget_hit;
    Ok(report)
}

/// Exhaustive interdiction oracle over the baseline path's interior
/// cells: try every wall subset of size ≤ k and return the one maximizing
/// the optimal path cost (disconnection beats any finite cost).
pub fn brute_force_attack_grid(
    grid: &Grid,
    h: GridHeuristic,
    k: u32,
    bound: u64,
) -> Result<AttackReport, BruteForceError> {
    let Some(path) = crate::grid::astar_path(grid, grid.start, grid.goal, h) else {
        return Err(BruteForceError::BaselineUnsolvable);
    };
    let baseline = PlanCost::Finite((path.len() - 1) as u64);
    // Interior cells only: endpoints can never legally be walled.
    let candidates: Vec<Cell> =
        if path.len() > 2 { path[1..path.len() - 1].to_vec() } else { Vec::new() };
    let required = subset_count(candidates.len() as u64, k);
    if required > bound {
        return Err(BruteForceError::BoundExceeded { required, bound });
    }

    let mut best_cost = baseline;
    let mut best_subset: Vec<Cell> = Vec::new();
    for_each_subset(&candidates, k, |subset| {
        if subset.is_empty() {
            return true;
        }
        let mut walled = grid.clone();
        for &c in subset {
            walled.set_wall(c);
        }
        let cost = match astar_cost(&walled, walled.start, walled.goal, h) {
            Some(c) => PlanCost::Finite(c as u64),
            None => PlanCost::Infinite,
        };
        if cost > best_cost {
            best_cost = cost;
            best_subset = subset.to_vec();
        }
        best_cost != PlanCost::Infinite
    });

    let removed = best_subset.iter().map(|&c| Change::Wall(c)).collect();
    Ok(AttackReport::new(baseline, best_cost, removed))
}

/// The cell an agent at `current` is expected to enter next: the free
/// successor minimizing `h`, ties broken in row-major order. `None` when
/// boxed in.
pub fn predict_next_cell(
    world: &Grid,
    current: Cell,
    goal: Cell,
    h: GridHeuristic,
) -> Option<Cell> {
    let mut best: Option<(f64, Cell)> = None;
    // free_neighbors is in canonical order; strict improvement keeps the
    // canonical argmin.
    for n in world.free_neighbors(current) {
        let v = h.eval(n, goal);
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, n));
        }
    }
    best.map(|(_, c)| c)
}

/// The state a planning agent at `current` is expected to visit next:
/// the successor minimizing `h`, ties broken by canonical state order.
/// `None` when no action applies.
pub fn predict_next_state(task: &Task, current: &State, h: Heuristic) -> Option<State> {
    let mut best: Option<(PlanCost, State)> = None;
    for action in &task.actions {
        if !action.applicable(current) {
            continue;
        }
        let next = apply_action(current, action).expect("applicable action");
        let v = evaluate(h, &next, task);
        let better = match &best {
            None => true,
            Some((bv, bs)) => v < *bv || (v == *bv && next < *bs),
        };
        if better {
            best = Some((v, next));
        }
    }
    best.map(|(_, s)| s)
}

#[cfg(test)]
mod tests;
