use super::*;
use crate::domains::{air_cargo_swap_task, air_cargo_task};
use crate::grid::Dir;
use crate::planner::Algorithm;
use crate::reduction::{mvap_to_strips, Arc, ArcGraph};
use crate::strips::Predicate;
use crate::windows::{
    build_strips_table, extract_grid_window, instance_seed, GridTableConfig, GridWindow,
    StripsTableConfig, StripsWindow, TableMeta, WindowAction, WindowTable,
};
use proptest::prelude::*;

fn arc(from: usize, to: usize, cost: u64) -> Arc {
    Arc { from, to, cost }
}

/// 0→1→2→3, unit costs: a single path, so any removal disconnects.
fn chain_task() -> Task {
    let g = ArcGraph::new(4, 0, 3, vec![arc(0, 1, 1), arc(1, 2, 1), arc(2, 3, 1)]).unwrap();
    mvap_to_strips(&g)
}

/// Cheap route 0→1→3 (cost 2) and expensive route 0→2→3 (cost 10).
fn diamond_task() -> Task {
    let g = ArcGraph::new(
        4,
        0,
        3,
        vec![arc(0, 1, 1), arc(1, 3, 1), arc(0, 2, 5), arc(2, 3, 5)],
    )
    .unwrap();
    mvap_to_strips(&g)
}

fn at(node: &str) -> State {
    State::from_predicates([Predicate::new("at", &[node])])
}

/// The two-state window that watches the first arc of a chain or diamond
/// being taken.
fn first_arc_window(schema: &str, from: &str, to: &str) -> StripsWindow {
    StripsWindow {
        states: vec![at(from), at(to)],
        actions: vec![WindowAction { schema: schema.to_string(), args: vec![] }],
        obj_types: [(from, "node"), (to, "node")]
            .iter()
            .map(|(o, t)| (o.to_string(), t.to_string()))
            .collect(),
    }
}

#[test]
fn threat_models_know_their_own_rules() {
    assert!(ThreatModel::informed_online(2).validate().is_ok());
    assert_eq!(ThreatModel::informed_online(1).label(), "informed-online");
    assert_eq!(ThreatModel::black_box_offline(3).label(), "black-box-offline");
    assert_eq!(
        ThreatModel::agent_heuristic_online(1, GridHeuristic::Euclidean).label(),
        "agent-heuristic-online"
    );

    let informed_offline = ThreatModel {
        mode: Mode::Offline,
        knowledge: Knowledge::AgentHeuristicAndInformed,
        h_adv: HeuristicSpec::Strips(Heuristic::Additive),
        budget: 1,
    };
    assert_eq!(informed_offline.validate(), Err(ThreatError::InformedRequiresOnline));
    assert_eq!(
        ThreatModel::informed_online(11).validate(),
        Err(ThreatError::BudgetTooLarge { budget: 11 })
    );
    assert!(ThreatModel::informed_online(MAX_BUDGET).validate().is_ok());
}

#[test]
fn report_flags_follow_the_cost_comparison() {
    let up = AttackReport::new(PlanCost::Finite(5), PlanCost::Finite(7), vec![]);
    assert!(up.success && !up.cost_decreased);
    let flat = AttackReport::new(PlanCost::Finite(5), PlanCost::Finite(5), vec![]);
    assert!(!flat.success && !flat.cost_decreased);
    let down = AttackReport::new(PlanCost::Finite(5), PlanCost::Finite(3), vec![]);
    assert!(!down.success && down.cost_decreased);
    let sealed = AttackReport::new(PlanCost::Finite(5), PlanCost::Infinite, vec![]);
    assert!(sealed.success);

    let mut timed = up.clone();
    timed.elapsed_ms = 12.5;
    assert_eq!(timed.canonical_record(), up);
}

#[test]
fn change_text_is_readable() {
    assert_eq!(Change::Wall(Cell::new(1, 0)).to_string(), "wall (1, 0)");
    let r = Change::RemoveAction { index: 3, action: "(fly p1 jfk sfo)".to_string() };
    assert_eq!(r.to_string(), "remove (fly p1 jfk sfo)");
}

// ---------------------------------------------------------------------
// Brute-force oracle.

#[test]
fn oracle_seals_the_single_corridor_with_its_first_wall() {
    // One path only: down the left side, along the bottom. The first
    // interior cell disconnects, and unsolvability stops the enumeration.
    let g = Grid::from_ascii("S.#\n.##\n..G\n").unwrap();
    let report =
        brute_force_attack_grid(&g, GridHeuristic::Euclidean, 1, DEFAULT_RESOLVE_BOUND).unwrap();
    assert_eq!(report.baseline_cost, PlanCost::Finite(4));
    assert_eq!(report.attacked_cost, PlanCost::Infinite);
    assert!(report.success);
    assert_eq!(report.removed, vec![Change::Wall(Cell::new(1, 0))]);
}

#[test]
fn oracle_reports_no_gain_when_detours_are_free() {
    // On an open 3×3 the border routes are disjoint: walls restricted to
    // one path's interior can never raise the cost.
    let g = Grid::open(3, 3);
    for k in [1, 2] {
        let report =
            brute_force_attack_grid(&g, GridHeuristic::Euclidean, k, DEFAULT_RESOLVE_BOUND)
                .unwrap();
        assert_eq!(report.baseline_cost, PlanCost::Finite(4));
        assert_eq!(report.attacked_cost, PlanCost::Finite(4));
        assert!(!report.success);
        assert!(report.removed.is_empty());
    }
}

#[test]
fn oracle_respects_its_resolve_bound() {
    let g = Grid::from_ascii("S.#\n.##\n..G\n").unwrap();
    // Three interior candidates: the empty subset plus three singletons.
    let err = brute_force_attack_grid(&g, GridHeuristic::Euclidean, 1, 3).unwrap_err();
    assert_eq!(err, BruteForceError::BoundExceeded { required: 4, bound: 3 });
    assert!(brute_force_attack_grid(&g, GridHeuristic::Euclidean, 1, 4).is_ok());
}

#[test]
fn oracle_rejects_unsolvable_baselines() {
    let boxed = Grid::from_ascii("S#\n#G\n").unwrap();
    assert_eq!(
        brute_force_attack_grid(&boxed, GridHeuristic::Euclidean, 1, 100).unwrap_err(),
        BruteForceError::BaselineUnsolvable
    );

    let g = ArcGraph::new(3, 0, 2, vec![arc(0, 1, 1)]).unwrap();
    let task = mvap_to_strips(&g);
    assert_eq!(
        brute_force_attack_task(&task, &SearchConfig::optimal(), 1, 100).unwrap_err(),
        BruteForceError::BaselineUnsolvable
    );
}

#[test]
fn swap_delivery_survives_one_removal_but_not_two() {
    // Either plane can shuttle both cargos alone in six actions, so no
    // single removal hurts; cutting both outbound flights strands one
    // cargo for good.
    let task = air_cargo_swap_task();
    let agent = SearchConfig::optimal();

    let one = brute_force_attack_task(&task, &agent, 1, DEFAULT_RESOLVE_BOUND).unwrap();
    assert_eq!(one.baseline_cost, PlanCost::Finite(6));
    assert_eq!(one.attacked_cost, PlanCost::Finite(6));
    assert!(!one.success && one.removed.is_empty());

    let two = brute_force_attack_task(&task, &agent, 2, DEFAULT_RESOLVE_BOUND).unwrap();
    assert_eq!(two.attacked_cost, PlanCost::Infinite);
    assert!(two.success);
    assert_eq!(two.removed.len(), 2);
    for change in &two.removed {
        let Change::RemoveAction { index, action } = change else {
            panic!("task attacks remove actions");
        };
        assert_eq!(task.actions[*index].text(), *action);
    }
}

#[test]
fn chain_oracle_cuts_the_only_path_immediately() {
    let task = chain_task();
    let report =
        brute_force_attack_task(&task, &SearchConfig::optimal(), 1, DEFAULT_RESOLVE_BOUND)
            .unwrap();
    assert_eq!(report.baseline_cost, PlanCost::Finite(3));
    assert_eq!(report.attacked_cost, PlanCost::Infinite);
    // Enumeration is index-ascending, so the first singleton wins.
    assert_eq!(
        report.removed,
        vec![Change::RemoveAction { index: 0, action: "(arc0-n0-n1)".to_string() }]
    );
}

// ---------------------------------------------------------------------
// Next-move prediction.

#[test]
fn prediction_breaks_heuristic_ties_canonically() {
    let g = Grid::open(3, 3);
    // From the far corner toward (0, 0): up and left tie on Euclidean
    // distance; canonical neighbor order puts up first.
    assert_eq!(
        predict_next_cell(&g, Cell::new(2, 2), Cell::new(0, 0), GridHeuristic::Euclidean),
        Some(Cell::new(1, 2))
    );

    let boxed = Grid::from_ascii("S#\n#G\n").unwrap();
    assert_eq!(
        predict_next_cell(&boxed, Cell::new(0, 0), Cell::new(1, 1), GridHeuristic::Euclidean),
        None
    );
}

#[test]
fn state_prediction_follows_the_cheaper_branch() {
    let task = diamond_task();
    let next = predict_next_state(&task, &task.init, Heuristic::Additive).unwrap();
    assert_eq!(next, at("n1"), "estimated remaining cost 1 beats 5");
    let after = predict_next_state(&task, &at("n1"), Heuristic::Additive).unwrap();
    assert_eq!(after, at("n3"));
    assert_eq!(predict_next_state(&task, &at("n3"), Heuristic::Additive), None);
}

// ---------------------------------------------------------------------
// Online attack.

fn empty_grid_table(n: usize) -> WindowTable<GridWindow> {
    WindowTable::new(TableMeta::new("grid", n))
}

#[test]
fn online_attack_with_an_empty_table_is_a_plain_walk() {
    let g = Grid::open(5, 5);
    let threat = ThreatModel::informed_online(3);
    let (report, transcript) =
        online_attack(&g, GridHeuristic::Euclidean, &empty_grid_table(3), &threat, SenseMode::Full)
            .unwrap();
    assert_eq!(report.baseline_cost, PlanCost::Finite(8));
    assert_eq!(report.attacked_cost, PlanCost::Finite(8));
    assert!(!report.success && report.removed.is_empty());
    assert_eq!(transcript.walked.len(), 8);
    assert_eq!(*transcript.walked.last().unwrap(), g.goal);
    assert_eq!(transcript.final_grid, g);
    assert!(transcript.events.iter().all(|e| e.event != "wall"));
}

#[test]
fn online_attack_with_zero_budget_never_acts() {
    let g = Grid::open(5, 5);
    let threat = ThreatModel::informed_online(0);
    // Even a table matching everything open is moot without budget.
    let mut table = empty_grid_table(3);
    table.insert(&extract_grid_window(&g, Cell::new(2, 2), 3, Dir::Down));
    let (report, transcript) =
        online_attack(&g, GridHeuristic::Euclidean, &table, &threat, SenseMode::Full).unwrap();
    assert!(report.removed.is_empty());
    assert_eq!(report.attacked_cost, report.baseline_cost);
    assert!(transcript
        .events
        .iter()
        .filter(|e| e.actor == "adversary")
        .all(|e| e.event == "idle"));
}

#[test]
fn corridor_agent_gets_sealed_in_by_the_first_placement() {
    // Single route around an inner wall; walling the agent's first move
    // disconnects it on the spot.
    let g = Grid::from_ascii("S.\n#.\nG.\n").unwrap();
    let mut table = empty_grid_table(3);
    table.insert(&extract_grid_window(&g, Cell::new(0, 1), 3, Dir::Right));

    for sense in [SenseMode::Full, SenseMode::Adjacent] {
        let threat = ThreatModel::informed_online(1);
        let (report, transcript) =
            online_attack(&g, GridHeuristic::Euclidean, &table, &threat, sense).unwrap();
        assert_eq!(report.baseline_cost, PlanCost::Finite(4));
        assert_eq!(report.attacked_cost, PlanCost::Infinite);
        assert!(report.success);
        assert_eq!(report.removed, vec![Change::Wall(Cell::new(0, 1))]);
        assert!(transcript.walked.is_empty(), "sealed before the first step");
        let kinds: Vec<&str> = transcript.events.iter().map(|e| e.event).collect();
        assert_eq!(kinds, vec!["wall", "stuck"]);
        assert!(transcript.final_grid.is_wall(Cell::new(0, 1)));
    }
}

#[test]
fn placements_on_the_goal_are_skipped_as_illegal() {
    // One corridor snaking around a bar; the goal sits in a pocket whose
    // seven-wall surround matches nothing else along the route, so the
    // only table hit is the illegal one on the goal itself.
    let g = Grid::from_ascii("S....\n####.\nG....\n").unwrap();
    let mut table = empty_grid_table(3);
    for d in [Dir::Up, Dir::Down, Dir::Left, Dir::Right] {
        table.insert(&extract_grid_window(&g, g.goal, 3, d));
    }
    let threat = ThreatModel::informed_online(2);
    let (report, transcript) =
        online_attack(&g, GridHeuristic::Euclidean, &table, &threat, SenseMode::Full).unwrap();
    assert_eq!(report.illegal_skipped, 1);
    assert!(report.removed.is_empty(), "the goal must never be walled");
    assert_eq!(report.baseline_cost, PlanCost::Finite(10));
    assert_eq!(report.attacked_cost, PlanCost::Finite(10));
    assert!(transcript.events.iter().any(|e| e.event == "illegal-skip"));
    assert_eq!(*transcript.walked.last().unwrap(), g.goal);
}

#[test]
fn online_attack_rejects_mismatched_threat_models() {
    let g = Grid::open(5, 5);
    let table = empty_grid_table(3);

    let offline = ThreatModel::black_box_offline(1);
    assert_eq!(
        online_attack(&g, GridHeuristic::Euclidean, &table, &offline, SenseMode::Full)
            .unwrap_err(),
        AttackError::WrongMode { expected: Mode::Online }
    );

    let wrong_flavor = ThreatModel {
        mode: Mode::Online,
        knowledge: Knowledge::BlackBox,
        h_adv: HeuristicSpec::Strips(Heuristic::Additive),
        budget: 1,
    };
    assert_eq!(
        online_attack(&g, GridHeuristic::Euclidean, &table, &wrong_flavor, SenseMode::Full)
            .unwrap_err(),
        AttackError::WrongHeuristicFlavor
    );

    let over_budget = ThreatModel::informed_online(MAX_BUDGET + 1);
    assert_eq!(
        online_attack(&g, GridHeuristic::Euclidean, &table, &over_budget, SenseMode::Full)
            .unwrap_err(),
        AttackError::Threat(ThreatError::BudgetTooLarge { budget: MAX_BUDGET + 1 })
    );

    let boxed = Grid::from_ascii("S#\n#G\n").unwrap();
    assert_eq!(
        online_attack(
            &boxed,
            GridHeuristic::Euclidean,
            &table,
            &ThreatModel::informed_online(1),
            SenseMode::Full
        )
        .unwrap_err(),
        AttackError::BaselineUnsolvable
    );
}

#[test]
fn online_attacks_against_real_mazes_hold_their_invariants() {
    let table = crate::windows::build_grid_table(&GridTableConfig {
        width: 11,
        height: 11,
        ..GridTableConfig::new(150, 41)
    });
    assert!(!table.is_empty());

    let mut successes = 0u32;
    for i in 0..30u64 {
        let seed = instance_seed(0xeade, i);
        let Ok(maze) = crate::grid::generate_maze(11, 11, 0.25, seed) else { continue };
        let threat = ThreatModel::informed_online(2);
        let (report, transcript) =
            online_attack(&maze, GridHeuristic::Euclidean, &table, &threat, SenseMode::Full)
                .unwrap();

        assert!(report.removed.len() <= 2);
        assert_eq!(report.success, report.attacked_cost > report.baseline_cost);
        for change in &report.removed {
            let Change::Wall(c) = change else { panic!("grid attacks place walls") };
            assert!(maze.is_free(*c), "walls go on formerly free cells");
            assert!(transcript.final_grid.is_wall(*c));
        }
        match report.attacked_cost {
            PlanCost::Finite(steps) => {
                assert_eq!(steps, transcript.walked.len() as u64);
                assert_eq!(*transcript.walked.last().unwrap(), maze.goal);
                // Walls are only ever added, so the walk is also a valid
                // walk of the original maze and can't beat its optimum.
                assert!(report.attacked_cost >= report.baseline_cost);
            }
            PlanCost::Infinite => {
                assert_ne!(transcript.walked.last(), Some(&maze.goal));
            }
        }
        successes += u32::from(report.success);
    }
    assert!(successes >= 5, "a trained table should hurt sometimes, got {successes}/30");
}

#[test]
fn online_attack_is_deterministic() {
    let table = crate::windows::build_grid_table(&GridTableConfig {
        width: 11,
        height: 11,
        ..GridTableConfig::new(120, 17)
    });
    let maze = crate::grid::generate_maze(11, 11, 0.25, 4242).unwrap();
    let threat = ThreatModel::agent_heuristic_online(2, GridHeuristic::Euclidean);
    let (r1, t1) =
        online_attack(&maze, GridHeuristic::Euclidean, &table, &threat, SenseMode::Adjacent)
            .unwrap();
    let (r2, t2) =
        online_attack(&maze, GridHeuristic::Euclidean, &table, &threat, SenseMode::Adjacent)
            .unwrap();
    assert_eq!(r1.canonical_record(), r2.canonical_record());
    assert_eq!(t1.events, t2.events);
    assert_eq!(t1.walked, t2.walked);
    assert_eq!(t1.final_grid, t2.final_grid);
}

// ---------------------------------------------------------------------
// Offline attack.

fn empty_strips_table(n: usize) -> WindowTable<StripsWindow> {
    WindowTable::new(TableMeta::new("strips", n))
}

fn offline_threat(budget: u32) -> ThreatModel {
    ThreatModel::agent_heuristic_offline(budget, Heuristic::Additive)
}

fn additive_adversary() -> SearchConfig {
    SearchConfig { heuristic: Heuristic::Additive, ..SearchConfig::optimal() }
}

#[test]
fn offline_attack_without_budget_or_table_changes_nothing() {
    let task = chain_task();
    let agent = SearchConfig::optimal();

    let mut table = empty_strips_table(2);
    let idle = offline_attack(&task, &table, &offline_threat(0), &additive_adversary(), &agent, false)
        .unwrap();
    assert_eq!(idle.baseline_cost, PlanCost::Finite(3));
    assert_eq!(idle.attacked_cost, PlanCost::Finite(3));
    assert!(idle.removed.is_empty() && !idle.success);

    table.insert(&first_arc_window("arc0-n0-n1", "n0", "n1"));
    let no_budget =
        offline_attack(&task, &table, &offline_threat(0), &additive_adversary(), &agent, false)
            .unwrap();
    assert!(no_budget.removed.is_empty());

    let no_table = offline_attack(
        &task,
        &empty_strips_table(2),
        &offline_threat(3),
        &additive_adversary(),
        &agent,
        false,
    )
    .unwrap();
    assert!(no_table.removed.is_empty());
}

#[test]
fn offline_attack_cuts_the_watched_chain_link() {
    let task = chain_task();
    let mut table = empty_strips_table(2);
    table.insert(&first_arc_window("arc0-n0-n1", "n0", "n1"));

    let report = offline_attack(
        &task,
        &table,
        &offline_threat(1),
        &additive_adversary(),
        &SearchConfig::optimal(),
        false,
    )
    .unwrap();
    assert_eq!(report.baseline_cost, PlanCost::Finite(3));
    assert_eq!(report.attacked_cost, PlanCost::Infinite);
    assert!(report.success);
    assert_eq!(
        report.removed,
        vec![Change::RemoveAction { index: 0, action: "(arc0-n0-n1)".to_string() }]
    );
}

#[test]
fn offline_removal_reroutes_search_onto_the_expensive_branch() {
    // The table watches only the cheap first arc. Removing it must
    // invalidate the subtree behind it; the search then reaches the goal
    // through the expensive branch without spending the second removal.
    let task = diamond_task();
    let mut table = empty_strips_table(2);
    table.insert(&first_arc_window("arc0-n0-n1", "n0", "n1"));

    for restart in [false, true] {
        let report = offline_attack(
            &task,
            &table,
            &offline_threat(2),
            &additive_adversary(),
            &SearchConfig::optimal(),
            restart,
        )
        .unwrap();
        assert_eq!(report.baseline_cost, PlanCost::Finite(2), "restart={restart}");
        assert_eq!(report.attacked_cost, PlanCost::Finite(10), "restart={restart}");
        assert!(report.success);
        assert_eq!(
            report.removed,
            vec![Change::RemoveAction { index: 0, action: "(arc0-n0-n1)".to_string() }]
        );
    }
}

#[test]
fn offline_attack_rejects_mismatched_threat_models() {
    let task = chain_task();
    let table = empty_strips_table(2);
    let agent = SearchConfig::optimal();

    let online = ThreatModel::agent_heuristic_online(1, GridHeuristic::Euclidean);
    assert_eq!(
        offline_attack(&task, &table, &online, &additive_adversary(), &agent, false).unwrap_err(),
        AttackError::WrongMode { expected: Mode::Offline }
    );

    let wrong_flavor = ThreatModel {
        mode: Mode::Offline,
        knowledge: Knowledge::BlackBox,
        h_adv: HeuristicSpec::Grid(GridHeuristic::Manhattan),
        budget: 1,
    };
    assert_eq!(
        offline_attack(&task, &table, &wrong_flavor, &additive_adversary(), &agent, false)
            .unwrap_err(),
        AttackError::WrongHeuristicFlavor
    );

    let unreachable = mvap_to_strips(&ArcGraph::new(3, 0, 2, vec![arc(0, 1, 1)]).unwrap());
    assert_eq!(
        offline_attack(&unreachable, &table, &offline_threat(1), &additive_adversary(), &agent, false)
            .unwrap_err(),
        AttackError::BaselineUnsolvable
    );

    let starved = SearchConfig { node_budget: 1, ..SearchConfig::optimal() };
    assert_eq!(
        offline_attack(&task, &table, &offline_threat(1), &additive_adversary(), &starved, false)
            .unwrap_err(),
        AttackError::AgentBudgetExhausted
    );
}

#[test]
fn offline_adversary_reports_its_own_exhaustion() {
    let task = air_cargo_task(1, 2, 2, 9);
    let mut table = empty_strips_table(2);
    // Any non-empty table forces the adversary to actually search.
    table.insert(&first_arc_window("arc0-n0-n1", "n0", "n1"));
    let starved_adversary = SearchConfig { node_budget: 2, ..additive_adversary() };
    let report = offline_attack(
        &task,
        &table,
        &offline_threat(2),
        &starved_adversary,
        &SearchConfig::optimal(),
        false,
    )
    .unwrap();
    assert!(report.adversary_budget_exhausted);
    assert!(report.removed.is_empty(), "nothing matched before the budget died");
    assert_eq!(report.attacked_cost, report.baseline_cost);
}

#[test]
fn offline_attacks_against_cargo_tasks_hold_their_invariants() {
    let table = build_strips_table(
        &StripsTableConfig { window_size: 3, ..StripsTableConfig::new(40, 5) },
        |seed| air_cargo_task(1, 2, 2, seed),
    );
    assert!(!table.is_empty());

    let agent = SearchConfig::optimal();
    let mut successes = 0u32;
    for i in 0..15u64 {
        let task = air_cargo_task(1, 2, 2, instance_seed(0x0ff1, i));
        let report =
            offline_attack(&task, &table, &offline_threat(2), &additive_adversary(), &agent, false)
                .unwrap();
        assert!(report.removed.len() <= 2);
        assert!(
            report.attacked_cost >= report.baseline_cost,
            "removals cannot help an optimal agent"
        );
        assert_eq!(report.success, report.attacked_cost > report.baseline_cost);

        // The reported attacked cost is reproducible from the removals.
        let removed: std::collections::BTreeSet<usize> = report
            .removed
            .iter()
            .map(|c| match c {
                Change::RemoveAction { index, .. } => *index,
                Change::Wall(_) => panic!("task attacks remove actions"),
            })
            .collect();
        let replay = solve(&task.without_actions(&removed), &agent).outcome.cost().unwrap();
        assert_eq!(replay, report.attacked_cost);
        successes += u32::from(report.success);
    }
    assert!(successes >= 1, "a trained table should land at least one hit");
}

#[test]
fn offline_attack_is_deterministic() {
    let table = build_strips_table(
        &StripsTableConfig { window_size: 3, ..StripsTableConfig::new(40, 5) },
        |seed| air_cargo_task(1, 2, 2, seed),
    );
    let task = air_cargo_task(1, 2, 2, 777);
    let run = || {
        offline_attack(
            &task,
            &table,
            &offline_threat(2),
            &additive_adversary(),
            &SearchConfig::optimal(),
            false,
        )
        .unwrap()
        .canonical_record()
    };
    assert_eq!(run(), run());
}

#[test]
fn bfs_adversary_still_finds_window_matches() {
    // The depth-ordered adversary must drive the same chain cut as the
    // heuristic one.
    let task = chain_task();
    let mut table = empty_strips_table(2);
    table.insert(&first_arc_window("arc0-n0-n1", "n0", "n1"));
    let bfs = SearchConfig { algorithm: Algorithm::Bfs, ..SearchConfig::optimal() };
    let report = offline_attack(
        &task,
        &table,
        &offline_threat(1),
        &bfs,
        &SearchConfig::optimal(),
        false,
    )
    .unwrap();
    assert_eq!(report.attacked_cost, PlanCost::Infinite);
}

// ---------------------------------------------------------------------
// Properties.

fn arb_graph() -> impl Strategy<Value = ArcGraph> {
    (2..6usize)
        .prop_flat_map(|n| {
            let arcs = proptest::collection::vec(
                (0..n, 0..n, 1..9u64).prop_filter_map("self-loop", |(u, v, c)| {
                    (u != v).then_some(Arc { from: u, to: v, cost: c })
                }),
                1..10,
            );
            (Just(n), arcs)
        })
        .prop_map(|(n, arcs)| ArcGraph { n, s: 0, t: n - 1, arcs })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    /// Removing more actions can only hurt: cost is monotone in the
    /// removal set.
    #[test]
    fn removal_supersets_never_cost_less(g in arb_graph(), extra in 0..16usize) {
        let task = mvap_to_strips(&g);
        let agent = SearchConfig::optimal();
        let small: std::collections::BTreeSet<usize> =
            (0..task.actions.len()).filter(|i| i % 3 == 0).collect();
        let mut large = small.clone();
        if !task.actions.is_empty() {
            large.insert(extra % task.actions.len());
        }
        let cost = |removed| match solve(&task.without_actions(removed), &agent).outcome.cost() {
            Some(c) => c,
            None => PlanCost::Infinite,
        };
        prop_assert!(cost(&small) <= cost(&large));
        prop_assert!(cost(&std::collections::BTreeSet::new()) <= cost(&small));
    }

    /// The oracle's best subset really achieves the cost it reports.
    #[test]
    fn oracle_reports_are_replayable(g in arb_graph(), k in 1..3u32) {
        let task = mvap_to_strips(&g);
        let agent = SearchConfig::optimal();
        let Ok(report) = brute_force_attack_task(&task, &agent, k, 100_000) else {
            return Ok(()); // unsolvable baseline or over bound
        };
        let removed: std::collections::BTreeSet<usize> = report
            .removed
            .iter()
            .map(|c| match c {
                Change::RemoveAction { index, .. } => *index,
                Change::Wall(_) => unreachable!(),
            })
            .collect();
        let replay = solve(&task.without_actions(&removed), &agent).outcome.cost().unwrap();
        prop_assert_eq!(replay, report.attacked_cost);
        prop_assert!(report.attacked_cost >= report.baseline_cost);
    }
}
