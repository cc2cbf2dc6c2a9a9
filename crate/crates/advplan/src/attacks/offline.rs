//! Action removal before the victim ever plans.
//!
//! The adversary runs its own best-first search over the task. Whenever
//! the tail of the path to a freshly selected node matches a learned
//! pattern, the action that produced that node is deleted from the task,
//! the parts of the search tree that depended on it are discarded, and
//! the search goes on over the reduced action set. The victim then plans
//! on whatever task is left.

use super::{AttackError, AttackReport, Change, HeuristicSpec, Mode, ThreatModel};
use crate::planner::{evaluate, solve, tie_key, Algorithm, SearchConfig};
use crate::strips::{apply_action, GroundedAction, PlanCost, State, Task};
use crate::windows::{extract_strips_window, normalize_window, StripsWindow, WindowTable};
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

struct ArenaNode {
    state: Rc<State>,
    parent: Option<usize>,
    /// Index into `task.actions` of the action that produced this node.
    action: Option<usize>,
    g: u64,
    depth: u64,
    /// Cached finite heuristic value (0 under breadth-first).
    h: u64,
    valid: bool,
    expanded: bool,
}

/// Last `n` states and `n − 1` actions on the path to `id`, oldest
/// first; `None` when the path is shorter than that.
fn tail_of_path(
    arena: &[ArenaNode],
    id: usize,
    n: usize,
    task: &Task,
) -> Option<(Vec<State>, Vec<GroundedAction>)> {
    let mut states: Vec<State> = Vec::with_capacity(n);
    let mut actions: Vec<GroundedAction> = Vec::with_capacity(n - 1);
    let mut cur = id;
    states.push((*arena[cur].state).clone());
    for _ in 0..n - 1 {
        let a = arena[cur].action?;
        actions.push(task.actions[a].clone());
        cur = arena[cur].parent.expect("node with an action has a parent");
        states.push((*arena[cur].state).clone());
    }
    states.reverse();
    actions.reverse();
    Some((states, actions))
}

fn priority(cfg: &SearchConfig, g: u64, depth: u64, h: u64) -> u64 {
    match cfg.algorithm {
        Algorithm::AStar => g + h,
        Algorithm::GreedyBestFirst => h,
        Algorithm::Bfs => depth,
    }
}

/// Reduce `task` by running the adversary's search against `table` and
/// deleting up to `threat.budget` matched actions, then report the cost
/// the `agent` planner pays on the reduced task.
///
/// With `restart_on_match` the adversary restarts its search from
/// scratch after every deletion instead of surgically pruning the
/// affected subtree; the set of deletions may differ, never the
/// mechanics. A zero budget or an empty table leaves the task untouched.
pub fn offline_attack(
    task: &Task,
    table: &WindowTable<StripsWindow>,
    threat: &ThreatModel,
    adversary: &SearchConfig,
    agent: &SearchConfig,
    restart_on_match: bool,
) -> Result<AttackReport, AttackError> {
    threat.validate().map_err(AttackError::Threat)?;
    if threat.mode != Mode::Offline {
        return Err(AttackError::WrongMode { expected: Mode::Offline });
    }
    if !matches!(threat.h_adv, HeuristicSpec::Strips(_)) {
        return Err(AttackError::WrongHeuristicFlavor);
    }
    let baseline = match solve(task, agent).outcome.cost() {
        Some(c @ PlanCost::Finite(_)) => c,
        Some(PlanCost::Infinite) => return Err(AttackError::BaselineUnsolvable),
        None => return Err(AttackError::AgentBudgetExhausted),
    };

    if threat.budget == 0 || table.is_empty() {
        return Ok(AttackReport::new(baseline, baseline, Vec::new()));
    }

    let n = table.meta.window_size;
    let mut removed_idx: BTreeSet<usize> = BTreeSet::new();
    let mut changes: Vec<Change> = Vec::new();
    let mut expansions: u64 = 0;
    let mut budget_exhausted = false;

    let mut arena: Vec<ArenaNode> = Vec::new();
    // (priority, tie, node id) — smallest first, ids give FIFO among ties.
    let mut open: BTreeSet<(u64, u64, usize)> = BTreeSet::new();
    // Settled states → best settled g.
    let mut closed: HashMap<Rc<State>, u64> = HashMap::new();

    let use_h = adversary.algorithm != Algorithm::Bfs;
    let seed_root = |arena: &mut Vec<ArenaNode>,
                     open: &mut BTreeSet<(u64, u64, usize)>,
                     reduced: &Task|
     -> bool {
        let root_h = if use_h {
            match evaluate(adversary.heuristic, &reduced.init, reduced) {
                PlanCost::Finite(v) => v,
                PlanCost::Infinite => return false,
            }
        } else {
            0
        };
        let state = Rc::new(reduced.init.clone());
        let tie = tie_key(adversary.tie_break, &state);
        arena.push(ArenaNode {
            state,
            parent: None,
            action: None,
            g: 0,
            depth: 0,
            h: root_h,
            valid: true,
            expanded: false,
        });
        open.insert((priority(adversary, 0, 0, root_h), tie, 0));
        true
    };

    // The working task shrinks as actions are deleted; grounded action
    // indices stay those of the original task throughout.
    let mut working = task.clone();
    if !seed_root(&mut arena, &mut open, &working) {
        // The adversary's heuristic already rules the task out; it never
        // selects a node, so nothing is removed.
        return Ok(AttackReport::new(baseline, baseline, Vec::new()));
    }

    while let Some((_, _, id)) = open.pop_first() {
        if !arena[id].valid {
            continue;
        }
        let state = Rc::clone(&arena[id].state);
        let g = arena[id].g;
        if let Some(&settled) = closed.get(&state) {
            let stale = match adversary.algorithm {
                Algorithm::AStar => settled <= g,
                _ => true,
            };
            if stale {
                continue;
            }
        }
        if working.is_goal(&state) {
            break;
        }

        // Pattern check on the tail of the path to this node.
        if (changes.len() as u32) < threat.budget {
            if let Some((states, actions)) = tail_of_path(&arena, id, n, task) {
                let window =
                    extract_strips_window(&states, &actions, actions.len() - 1, n, task)
                        .expect("tail has exactly the window shape");
                if table.lookup(&normalize_window(&window)).is_some() {
                    let victim = arena[id].action.expect("windowed path has an action");
                    removed_idx.insert(victim);
                    changes.push(Change::RemoveAction {
                        index: victim,
                        action: task.actions[victim].text(),
                    });
                    working = task.without_actions(&removed_idx);
                    if (changes.len() as u32) >= threat.budget {
                        break;
                    }
                    if restart_on_match {
                        arena.clear();
                        open.clear();
                        closed.clear();
                        if !seed_root(&mut arena, &mut open, &working) {
                            break;
                        }
                    } else {
                        // A node survives iff its parent survives and its
                        // producing action still exists; parents precede
                        // children in the arena, so one pass suffices.
                        for i in 0..arena.len() {
                            let parent_ok = arena[i].parent.is_none_or(|p| arena[p].valid);
                            let action_ok =
                                arena[i].action.is_none_or(|a| !removed_idx.contains(&a));
                            arena[i].valid = parent_ok && action_ok;
                        }
                        closed.clear();
                        open.clear();
                        for (i, node) in arena.iter().enumerate() {
                            if !node.valid {
                                continue;
                            }
                            if node.expanded {
                                closed
                                    .entry(Rc::clone(&node.state))
                                    .and_modify(|best| *best = (*best).min(node.g))
                                    .or_insert(node.g);
                            } else {
                                let tie = tie_key(adversary.tie_break, &node.state);
                                open.insert((
                                    priority(adversary, node.g, node.depth, node.h),
                                    tie,
                                    i,
                                ));
                            }
                        }
                    }
                    // The selected node itself depended on the deleted
                    // action; it is never expanded.
                    continue;
                }
            }
        }

        // Expand.
        if expansions >= adversary.node_budget {
            budget_exhausted = true;
            break;
        }
        expansions += 1;
        arena[id].expanded = true;
        closed
            .entry(Rc::clone(&state))
            .and_modify(|best| *best = (*best).min(g))
            .or_insert(g);

        for (a_idx, action) in task.actions.iter().enumerate() {
            if removed_idx.contains(&a_idx) || !action.applicable(&state) {
                continue;
            }
            let next = apply_action(&state, action).expect("applicable action");
            let child_g = g + action.cost;
            if let Some(&settled) = closed.get(&next) {
                let skip = match adversary.algorithm {
                    Algorithm::AStar => settled <= child_g,
                    _ => true,
                };
                if skip {
                    continue;
                }
            }
            let child_h = if use_h {
                match evaluate(adversary.heuristic, &next, &working) {
                    PlanCost::Finite(v) => v,
                    PlanCost::Infinite => continue,
                }
            } else {
                0
            };
            let next = Rc::new(next);
            let tie = tie_key(adversary.tie_break, &next);
            let child_id = arena.len();
            arena.push(ArenaNode {
                state: next,
                parent: Some(id),
                action: Some(a_idx),
                g: child_g,
                depth: arena[id].depth + 1,
                h: child_h,
                valid: true,
                expanded: false,
            });
            open.insert((
                priority(adversary, child_g, arena[child_id].depth, child_h),
                tie,
                child_id,
            ));
        }
    }

    let attacked = if changes.is_empty() {
        baseline
    } else {
        match solve(&working, agent).outcome.cost() {
            Some(c) => c,
            None => return Err(AttackError::AgentBudgetExhausted),
        }
    };
    let mut report = AttackReport::new(baseline, attacked, changes);
    report.adversary_expanded = expansions;
    report.adversary_budget_exhausted = budget_exhausted;
    Ok(report)
}
