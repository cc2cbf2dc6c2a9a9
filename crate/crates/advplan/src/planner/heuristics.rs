//! Planning heuristics.

use crate::strips::{PlanCost, Predicate, State, Task};
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

/// Number of goal predicates that do not hold in `state`.
pub fn h_goal_count(state: &State, goal: &BTreeSet<Predicate>) -> u64 {
    goal.iter().filter(|g| !state.contains(g)).count() as u64
}

/// Additive delete-relaxation heuristic.
///
/// Every atom gets the cheapest cost of making it true when delete effects
/// are ignored and precondition costs simply add up; the heuristic is the
/// sum over goal atoms. Informative but not admissible (shared
/// subgoals are double-counted). `Infinite` means the goal is unreachable
/// even in the relaxation, hence unreachable in the real task.
///
/// Computed as a Dijkstra-style sweep over atoms: an action fires once all
/// its preconditions have settled, at cost `action.cost + Σ precondition
/// costs`.
pub fn h_additive(state: &State, task: &Task) -> PlanCost {
    // Atom costs discovered so far; absent = not yet reached.
    let mut dist: HashMap<&Predicate, u64> = HashMap::new();
    let mut heap: BinaryHeap<Reverse<(u64, &Predicate)>> = BinaryHeap::new();
    for p in state.iter() {
        dist.insert(p, 0);
        heap.push(Reverse((0, p)));
    }

    // How many preconditions each action still waits on, and which actions
    // wait on a given atom.
    let mut waiting: Vec<usize> = Vec::with_capacity(task.actions.len());
    let mut watchers: HashMap<&Predicate, Vec<usize>> = HashMap::new();
    for (i, a) in task.actions.iter().enumerate() {
        waiting.push(a.preconditions.len());
        for p in &a.preconditions {
            watchers.entry(p).or_default().push(i);
        }
    }

    // An action fires once its preconditions have settled, relaxing the
    // cost of everything it adds.
    fn fire<'t>(
        task: &'t Task,
        i: usize,
        dist: &mut HashMap<&'t Predicate, u64>,
        heap: &mut BinaryHeap<Reverse<(u64, &'t Predicate)>>,
    ) {
        let a = &task.actions[i];
        let pre_sum: u64 = a
            .preconditions
            .iter()
            .map(|p| *dist.get(p).expect("fired only after all preconditions settle"))
            .sum();
        let value = a.cost + pre_sum;
        for add in &a.add_effects {
            let better = dist.get(add).is_none_or(|&old| value < old);
            if better {
                dist.insert(add, value);
                heap.push(Reverse((value, add)));
            }
        }
    }

    // Actions with no preconditions fire immediately.
    for (i, a) in task.actions.iter().enumerate() {
        if a.preconditions.is_empty() {
            fire(task, i, &mut dist, &mut heap);
        }
    }

    let mut settled: HashMap<&Predicate, u64> = HashMap::new();
    while let Some(Reverse((d, p))) = heap.pop() {
        if settled.contains_key(p) {
            continue;
        }
        if dist.get(p) != Some(&d) {
            continue; // stale entry
        }
        settled.insert(p, d);
        if let Some(watch) = watchers.get(p) {
            for &i in watch {
                waiting[i] -= 1;
                if waiting[i] == 0 {
                    fire(task, i, &mut dist, &mut heap);
                }
            }
        }
    }

    let mut total = 0u64;
    for g in &task.goal {
        match settled.get(g) {
            Some(&d) => total += d,
            None => return PlanCost::Infinite,
        }
    }
    PlanCost::Finite(total)
}
