//! Shortest-path interdiction on digraphs, and its embedding into
//! planning-task interdiction.
//!
//! An [`ArcGraph`] is a weighted digraph with fixed source and target.
//! [`mvap_to_strips`] turns it into a planning task whose grounded
//! actions correspond one-to-one with the arcs, so that removing an
//! action is exactly removing an arc, and optimal plan cost equals
//! shortest-path distance. Exhaustive deciders for both sides make the
//! correspondence checkable.

use crate::planner::{solve, SearchConfig};
use crate::strips::{ActionSchema, Atom, PlanCost, Predicate, State, Task, Term};
use crate::util::{for_each_subset, subset_count};
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;

/// One weighted arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub cost: u64,
}

/// A digraph with a source and a target, in the arc-list format:
/// a header `n s t`, then one `u v cost` line per arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcGraph {
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub arcs: Vec<Arc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    Syntax { line: usize, message: String },
    Invalid(String),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::Syntax { line, message } => write!(f, "line {line}: {message}"),
            GraphError::Invalid(message) => write!(f, "{message}"),
        }
    }
}

impl std::error::Error for GraphError {}

impl ArcGraph {
    pub fn new(n: usize, s: usize, t: usize, arcs: Vec<Arc>) -> Result<ArcGraph, GraphError> {
        let g = ArcGraph { n, s, t, arcs };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), GraphError> {
        if self.n == 0 {
            return Err(GraphError::Invalid("graph needs at least one node".into()));
        }
        if self.s >= self.n || self.t >= self.n {
            return Err(GraphError::Invalid(format!(
                "source {} or target {} out of range for {} nodes",
                self.s, self.t, self.n
            )));
        }
        for (i, a) in self.arcs.iter().enumerate() {
            if a.from >= self.n || a.to >= self.n {
                return Err(GraphError::Invalid(format!(
                    "arc {i} endpoints ({}, {}) out of range",
                    a.from, a.to
                )));
            }
            if a.from == a.to {
                return Err(GraphError::Invalid(format!("arc {i} is a self-loop at {}", a.from)));
            }
        }
        Ok(())
    }

    /// Stable object name for a node.
    pub fn node_name(i: usize) -> String {
        format!("n{i}")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.s, self.t);
        for a in &self.arcs {
            out.push_str(&format!("{} {} {}\n", a.from, a.to, a.cost));
        }
        out
    }

    /// Parse the arc-list format. Blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> Result<ArcGraph, GraphError> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut arcs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(GraphError::Syntax {
                    line: line_no,
                    message: format!("expected 3 fields, got {}", fields.len()),
                });
            }
            let nums: Vec<u64> = fields
                .iter()
                .map(|f| {
                    f.parse::<u64>().map_err(|_| GraphError::Syntax {
                        line: line_no,
                        message: format!("bad number {f:?}"),
                    })
                })
                .collect::<Result<_, _>>()?;
            if header.is_none() {
                header = Some((nums[0] as usize, nums[1] as usize, nums[2] as usize));
            } else {
                arcs.push(Arc { from: nums[0] as usize, to: nums[1] as usize, cost: nums[2] });
            }
        }
        let Some((n, s, t)) = header else {
            return Err(GraphError::Invalid("empty graph file".into()));
        };
        ArcGraph::new(n, s, t, arcs)
    }

    /// Clone with the arcs at `removed` indices absent.
    pub fn without_arcs(&self, removed: &BTreeSet<usize>) -> ArcGraph {
        ArcGraph {
            n: self.n,
            s: self.s,
            t: self.t,
            arcs: self
                .arcs
                .iter()
                .enumerate()
                .filter(|(i, _)| !removed.contains(i))
                .map(|(_, a)| *a)
                .collect(),
        }
    }
}

/// Shortest s→t distance, if any.
pub fn dijkstra(g: &ArcGraph) -> Option<u64> {
    let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); g.n];
    for a in &g.arcs {
        adj[a.from].push((a.to, a.cost));
    }
    let mut dist: Vec<Option<u64>> = vec![None; g.n];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, g.s)));
    while let Some(Reverse((d, u))) = heap.pop() {
        match dist[u] {
            Some(best) if best <= d => continue,
            _ => dist[u] = Some(d),
        }
        if u == g.t {
            return Some(d);
        }
        for &(v, c) in &adj[u] {
            if dist[v].is_none() {
                heap.push(Reverse((d + c, v)));
            }
        }
    }
    dist[g.t]
}

/// Embed the graph into a planning task: one object per node, a
/// one-place predicate marking where the traveler stands, and one
/// zero-parameter schema per arc that moves the marker along it at the
/// arc's cost. Grounded action `i` corresponds to arc `i`, and optimal
/// plan cost equals shortest-path distance.
pub fn mvap_to_strips(g: &ArcGraph) -> Task {
    let mut objects = BTreeMap::new();
    for i in 0..g.n {
        objects.insert(ArcGraph::node_name(i), "node".to_string());
    }
    let mut predicates = BTreeMap::new();
    predicates.insert("at".to_string(), 1usize);
    let at = |i: usize| Atom {
        name: "at".to_string(),
        args: vec![Term::Obj(ArcGraph::node_name(i))],
    };
    // Index-tagged names keep parallel arcs distinct; zero-padding keeps
    // the grounded order equal to the arc order.
    let width = g.arcs.len().saturating_sub(1).to_string().len();
    let schemas = g
        .arcs
        .iter()
        .enumerate()
        .map(|(i, a)| ActionSchema {
            name: format!("arc{i:0width$}-n{}-n{}", a.from, a.to),
            params: Vec::new(),
            preconditions: BTreeSet::from([at(a.from)]),
            add_effects: BTreeSet::from([at(a.to)]),
            del_effects: BTreeSet::from([at(a.from)]),
            cost: a.cost,
        })
        .collect();

    let task = Task {
        domain_name: "arc-walk".to_string(),
        problem_name: format!("walk-{}-to-{}", g.s, g.t),
        types: vec!["node".to_string()],
        objects,
        predicates,
        schemas,
        init: State::from_predicates([Predicate::new("at", &[&ArcGraph::node_name(g.s)])]),
        goal: BTreeSet::from([Predicate::new("at", &[&ArcGraph::node_name(g.t)])]),
        actions: Vec::new(),
    };
    task.ground()
}

/// Hard cap on exhaustive interdiction work.
pub const INTERDICTION_BOUND: u64 = 5_000_000;

/// Exhaustive arc interdiction: over all arc subsets of size ≤ k,
/// the largest achievable s→t distance (removal sets that disconnect
/// count as unbounded) and the first subset achieving it.
pub fn max_arc_interdiction(g: &ArcGraph, k: u32) -> (PlanCost, Vec<usize>) {
    assert!(
        subset_count(g.arcs.len() as u64, k) <= INTERDICTION_BOUND,
        "arc interdiction blow-up: {} arcs, budget {k}",
        g.arcs.len()
    );
    let indices: Vec<usize> = (0..g.arcs.len()).collect();
    let mut best = PlanCost::Finite(0);
    let mut best_set: Vec<usize> = Vec::new();
    let mut first = true;
    for_each_subset(&indices, k, |subset| {
        let reduced = g.without_arcs(&subset.iter().copied().collect());
        let cost = match dijkstra(&reduced) {
            Some(d) => PlanCost::Finite(d),
            None => PlanCost::Infinite,
        };
        if first || cost > best {
            best = cost;
            best_set = subset.to_vec();
            first = false;
        }
        best != PlanCost::Infinite
    });
    (best, best_set)
}

/// Decision form: can removing ≤ k arcs push the distance to `threshold`
/// or beyond (disconnection always counts)?
pub fn decide_arc_interdiction(g: &ArcGraph, k: u32, threshold: u64) -> bool {
    max_arc_interdiction(g, k).0 >= PlanCost::Finite(threshold)
}

/// Exhaustive action interdiction: over all grounded-action subsets of
/// size ≤ k, the largest achievable optimal plan cost and the first
/// subset achieving it. Re-solves with an optimal planner each time.
pub fn max_action_interdiction(task: &Task, k: u32) -> (PlanCost, Vec<usize>) {
    assert!(
        subset_count(task.actions.len() as u64, k) <= INTERDICTION_BOUND,
        "action interdiction blow-up: {} actions, budget {k}",
        task.actions.len()
    );
    let agent = SearchConfig::optimal();
    let indices: Vec<usize> = (0..task.actions.len()).collect();
    let mut best = PlanCost::Finite(0);
    let mut best_set: Vec<usize> = Vec::new();
    let mut first = true;
    for_each_subset(&indices, k, |subset| {
        let reduced = task.without_actions(&subset.iter().copied().collect());
        let cost = solve(&reduced, &agent)
            .outcome
            .cost()
            .expect("interdiction oracle requires an unbounded agent");
        if first || cost > best {
            best = cost;
            best_set = subset.to_vec();
            first = false;
        }
        best != PlanCost::Infinite
    });
    (best, best_set)
}

/// Decision form on the task side: can removing ≤ k grounded actions
/// push the optimal plan cost to `threshold` or beyond?
pub fn decide_action_interdiction(task: &Task, k: u32, threshold: u64) -> bool {
    max_action_interdiction(task, k).0 >= PlanCost::Finite(threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn diamond() -> ArcGraph {
        // Two s→t routes: cheap via node 1 (cost 3), dear via node 2
        // (cost 7), plus a direct arc of cost 10.
        ArcGraph::new(
            4,
            0,
            3,
            vec![
                Arc { from: 0, to: 1, cost: 1 },
                Arc { from: 1, to: 3, cost: 2 },
                Arc { from: 0, to: 2, cost: 3 },
                Arc { from: 2, to: 3, cost: 4 },
                Arc { from: 0, to: 3, cost: 10 },
            ],
        )
        .unwrap()
    }

    fn random_graph(seed: u64) -> ArcGraph {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.random_range(2..=12);
        let mut arcs = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.random_bool(0.3) {
                    arcs.push(Arc { from: u, to: v, cost: rng.random_range(0..=9) });
                }
            }
        }
        let t = rng.random_range(1..n);
        ArcGraph::new(n, 0, t, arcs).unwrap()
    }

    #[test]
    fn dijkstra_picks_the_cheap_route() {
        assert_eq!(dijkstra(&diamond()), Some(3));
    }

    #[test]
    fn dijkstra_reports_disconnection() {
        let g = ArcGraph::new(3, 0, 2, vec![Arc { from: 0, to: 1, cost: 1 }]).unwrap();
        assert_eq!(dijkstra(&g), None);
    }

    #[test]
    fn the_embedded_task_walks_the_same_distances() {
        let g = diamond();
        let task = mvap_to_strips(&g);
        assert_eq!(task.actions.len(), g.arcs.len());
        let result = solve(&task, &SearchConfig::optimal());
        assert_eq!(result.outcome.cost(), Some(PlanCost::Finite(3)));
    }

    #[test]
    fn grounded_actions_line_up_with_arcs() {
        let g = diamond();
        let task = mvap_to_strips(&g);
        for (i, arc) in g.arcs.iter().enumerate() {
            let a = &task.actions[i];
            assert_eq!(a.cost, arc.cost);
            assert!(a.schema.contains(&format!("-n{}-n{}", arc.from, arc.to)));
        }
    }

    #[test]
    fn interdicting_the_diamond_by_hand() {
        let g = diamond();
        // k=1: cutting (1,3) — or (0,1) — forces the dear route.
        let (best1, set1) = max_arc_interdiction(&g, 1);
        assert_eq!(best1, PlanCost::Finite(7));
        assert_eq!(set1, vec![0]);
        // k=2: cutting both cheap routes leaves the direct arc.
        let (best2, _) = max_arc_interdiction(&g, 2);
        assert_eq!(best2, PlanCost::Finite(10));
        // k=3: full disconnection.
        let (best3, _) = max_arc_interdiction(&g, 3);
        assert_eq!(best3, PlanCost::Infinite);
    }

    #[test]
    fn decision_thresholds_bracket_the_maximum() {
        let g = diamond();
        assert!(decide_arc_interdiction(&g, 1, 7));
        assert!(!decide_arc_interdiction(&g, 1, 8));
        assert!(decide_arc_interdiction(&g, 3, u64::MAX));
    }

    #[test]
    fn both_interdiction_sides_agree_on_random_graphs() {
        for seed in 0..40 {
            let g = random_graph(seed);
            let task = mvap_to_strips(&g);
            for k in 0..=2 {
                let (arc_best, _) = max_arc_interdiction(&g, k);
                let (act_best, _) = max_action_interdiction(&task, k);
                assert_eq!(arc_best, act_best, "seed {seed} budget {k}");
                for h in [0, 1, 3, 8, 20] {
                    assert_eq!(
                        decide_arc_interdiction(&g, k, h),
                        decide_action_interdiction(&task, k, h),
                        "seed {seed} budget {k} threshold {h}"
                    );
                }
            }
        }
    }

    #[test]
    fn arc_list_round_trips() {
        let g = diamond();
        let text = g.to_text();
        assert_eq!(ArcGraph::parse(&text).unwrap(), g);
        assert!(text.starts_with("4 0 3\n"));
    }

    #[test]
    fn parse_rejects_malformed_graphs() {
        assert!(matches!(ArcGraph::parse(""), Err(GraphError::Invalid(_))));
        assert!(matches!(
            ArcGraph::parse("3 0 2\n0 1\n"),
            Err(GraphError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            ArcGraph::parse("3 0 2\n0 x 1\n"),
            Err(GraphError::Syntax { line: 2, .. })
        ));
        assert!(ArcGraph::parse("3 0 5\n").is_err()); // target out of range
        assert!(ArcGraph::parse("3 0 2\n1 1 4\n").is_err()); // self-loop
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let g = ArcGraph::parse("# tiny\n\n2 0 1\n0 1 5\n").unwrap();
        assert_eq!(g.n, 2);
        assert_eq!(dijkstra(&g), Some(5));
    }
}
