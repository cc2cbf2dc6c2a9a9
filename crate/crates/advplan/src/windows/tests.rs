use super::*;
use crate::attacks::brute_force_attack_grid;
use crate::domains::{air_cargo_swap_task, air_cargo_task};
use crate::grid::{generate_maze, Grid, GridHeuristic};
use crate::planner::{solve, SearchConfig};
use crate::strips::{apply_action, Predicate, State};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn state(preds: &[(&str, &[&str])]) -> State {
    State::from_predicates(preds.iter().map(|(n, a)| Predicate::new(*n, a)))
}

fn window(
    states: Vec<State>,
    actions: &[(&str, &[&str])],
    types: &[(&str, &str)],
) -> StripsWindow {
    StripsWindow {
        states,
        actions: actions
            .iter()
            .map(|(s, a)| WindowAction {
                schema: s.to_string(),
                args: a.iter().map(|x| x.to_string()).collect(),
            })
            .collect(),
        obj_types: types.iter().map(|(o, t)| (o.to_string(), t.to_string())).collect(),
    }
}

/// A flight-and-unload window around plane p1: p3 idles at las the whole
/// time, so it never appears in an action.
fn flight_window_a() -> StripsWindow {
    window(
        vec![
            state(&[("in", &["c5", "p1"]), ("at", &["p1", "phx"]), ("at", &["p3", "las"])]),
            state(&[("in", &["c5", "p1"]), ("at", &["p1", "las"]), ("at", &["p3", "las"])]),
            state(&[("in", &["c5", "p1"]), ("at", &["p1", "sfo"]), ("at", &["p3", "las"])]),
            state(&[("at", &["c5", "sfo"]), ("at", &["p1", "sfo"]), ("at", &["p3", "las"])]),
        ],
        &[
            ("fly", &["p1", "phx", "las"]),
            ("fly", &["p1", "las", "sfo"]),
            ("unload", &["c5", "p1", "sfo"]),
        ],
        &[
            ("p1", "plane"),
            ("p3", "plane"),
            ("c5", "cargo"),
            ("phx", "airport"),
            ("las", "airport"),
            ("sfo", "airport"),
        ],
    )
}

/// The same pattern with every object renamed — including `phx`, which
/// reappears in a different role.
fn flight_window_b() -> StripsWindow {
    window(
        vec![
            state(&[("in", &["c4", "p2"]), ("at", &["p2", "phl"]), ("at", &["p1", "phx"])]),
            state(&[("in", &["c4", "p2"]), ("at", &["p2", "phx"]), ("at", &["p1", "phx"])]),
            state(&[("in", &["c4", "p2"]), ("at", &["p2", "jfk"]), ("at", &["p1", "phx"])]),
            state(&[("at", &["c4", "jfk"]), ("at", &["p2", "jfk"]), ("at", &["p1", "phx"])]),
        ],
        &[
            ("fly", &["p2", "phl", "phx"]),
            ("fly", &["p2", "phx", "jfk"]),
            ("unload", &["c4", "p2", "jfk"]),
        ],
        &[
            ("p1", "plane"),
            ("p2", "plane"),
            ("c4", "cargo"),
            ("phl", "airport"),
            ("phx", "airport"),
            ("jfk", "airport"),
        ],
    )
}

#[test]
fn renamed_flight_windows_are_equivalent_with_the_exact_witness() {
    let a = flight_window_a();
    let b = flight_window_b();
    let witness = strips_windows_equivalent(&a, &b).expect("same pattern");
    let expected: BTreeMap<String, String> = [
        ("p2", "p1"),
        ("phl", "phx"),
        ("phx", "las"),
        ("jfk", "sfo"),
        ("c4", "c5"),
        ("p1", "p3"),
    ]
    .iter()
    .map(|(x, y)| (x.to_string(), y.to_string()))
    .collect();
    assert_eq!(witness, expected);

    // And the mirror-image witness going the other way.
    let back = strips_windows_equivalent(&b, &a).expect("symmetry");
    let inverted: BTreeMap<String, String> =
        expected.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
    assert_eq!(back, inverted);

    assert_eq!(a.canonical_key(), b.canonical_key());
}

#[test]
fn different_schema_sequences_are_never_equivalent() {
    let a = flight_window_a();
    let mut b = flight_window_b();
    b.actions[2].schema = "load".to_string();
    assert_eq!(strips_windows_equivalent(&a, &b), None);
    assert_ne!(a.canonical_key(), b.canonical_key());
}

#[test]
fn type_changes_break_equivalence() {
    let a = flight_window_a();
    let mut b = flight_window_b();
    b.obj_types.insert("c4".to_string(), "freight".to_string());
    assert_eq!(strips_windows_equivalent(&a, &b), None);
}

#[test]
fn normalization_strips_exactly_the_common_predicates() {
    let a = flight_window_a();
    let n = normalize_window(&a);
    // (at p3 las) holds in every state; nothing else does.
    let gone = Predicate::new("at", &["p3", "las"]);
    for (orig, reduced) in a.states.iter().zip(&n.states) {
        assert!(orig.contains(&gone));
        assert!(!reduced.contains(&gone));
        assert_eq!(reduced.len(), orig.len() - 1);
    }
    assert_eq!(n.actions, a.actions);
    // p3 vanished with its predicate; the other objects keep their types.
    assert!(!n.obj_types.contains_key("p3"));
    assert_eq!(n.obj_types.len(), a.obj_types.len() - 1);
    assert_eq!(normalize_window(&n), n, "normalization is idempotent");
}

#[test]
fn window_change_is_the_last_action() {
    let a = flight_window_a();
    assert_eq!(a.change().text(), "(unload c5 p1 sfo)");
}

#[test]
fn extraction_cuts_the_right_span() {
    let task = air_cargo_swap_task();
    let plan = solve(&task, &SearchConfig::optimal()).outcome.plan().unwrap().clone();
    assert_eq!(plan.len(), 6);
    let mut states = vec![task.init.clone()];
    for a in &plan.actions {
        states.push(apply_action(states.last().unwrap(), a).unwrap());
    }

    let w = extract_strips_window(&states, &plan.actions, 5, 3, &task).unwrap();
    assert_eq!(w.states.len(), 3);
    assert_eq!(w.actions.len(), 2);
    assert_eq!(w.states[0], states[4]);
    assert_eq!(w.states[2], states[6]);
    assert_eq!(w.actions[0], WindowAction::of(&plan.actions[4]));
    assert_eq!(w.actions[1], WindowAction::of(&plan.actions[5]));
    for o in w.objects() {
        assert_eq!(w.type_of(o), task.objects[o]);
    }

    // Too early in the trajectory for a 3-window.
    assert!(matches!(
        extract_strips_window(&states, &plan.actions, 0, 3, &task),
        Err(WindowError::TrajectoryTooShort { states: 2, needed: 3 })
    ));
    // A 2-window fits anywhere.
    assert!(extract_strips_window(&states, &plan.actions, 0, 2, &task).is_ok());
    assert!(matches!(
        extract_strips_window(&states, &plan.actions, 0, 1, &task),
        Err(WindowError::BadSize { n: 1 })
    ));
}

#[test]
fn grid_window_rotation_carries_the_approach_along() {
    let mut mask = vec![false; 9];
    mask[0] = true; // wall in the top-left corner
    let w = GridWindow::new(3, mask, Dir::Up);

    let r1 = w.rotate_cw();
    assert!(r1.is_wall(0, 2));
    assert_eq!(r1.approach(), Dir::Right);
    let r2 = r1.rotate_cw();
    assert!(r2.is_wall(2, 2));
    assert_eq!(r2.approach(), Dir::Down);
    let r4 = r2.rotate_cw().rotate_cw();
    assert_eq!(r4, w, "four quarter turns are the identity");
}

#[test]
fn grid_canonical_is_the_least_rotation() {
    let mut mask = vec![false; 9];
    mask[0] = true;
    let w = GridWindow::new(3, mask, Dir::Up);
    let c = w.canonical();
    // The least mask (false < true) puts the lone wall last in row-major
    // order.
    assert!(c.is_wall(2, 2));
    assert_eq!(c.approach(), Dir::Down);
    for turns in [w.rotate_cw(), w.rotate_cw().rotate_cw()] {
        assert_eq!(turns.canonical(), c);
        assert_eq!(turns.canonical_key(), w.canonical_key());
    }
}

#[test]
fn grid_equivalence_is_joint_rotation_of_mask_and_direction() {
    let mut mask = vec![false; 9];
    mask[0] = true;
    let up = GridWindow::new(3, mask.clone(), Dir::Up);
    let down_same_mask = GridWindow::new(3, mask, Dir::Down);
    // Same mask, opposite approach: the 180° turn that aligns the
    // directions moves the wall to the other corner.
    assert_eq!(grid_windows_equivalent(&up, &down_same_mask), None);

    // On a rotation-invariant mask the approach alone decides the turn.
    let open_up = GridWindow::new(3, vec![false; 9], Dir::Up);
    let open_right = GridWindow::new(3, vec![false; 9], Dir::Right);
    assert_eq!(grid_windows_equivalent(&open_up, &open_right), Some(1));
    assert_eq!(grid_windows_equivalent(&open_up, &open_up), Some(0));
}

#[test]
fn extraction_at_a_corner_sees_the_outside_as_walls() {
    let grid = Grid::open(5, 5);
    let w = extract_grid_window(&grid, crate::grid::Cell::new(0, 0), 3, Dir::Down);
    let walls: usize = (0..3).flat_map(|r| (0..3).map(move |c| (r, c)))
        .filter(|&(r, c)| w.is_wall(r, c))
        .count();
    assert_eq!(walls, 5, "the two out-of-bounds edges cover five cells");
    assert!(w.is_wall(0, 0) && w.is_wall(0, 1) && w.is_wall(0, 2));
    assert!(w.is_wall(1, 0) && w.is_wall(2, 0));

    let inner = extract_grid_window(&grid, crate::grid::Cell::new(2, 2), 3, Dir::Down);
    assert!((0..3).all(|r| (0..3).all(|c| !inner.is_wall(r, c))));
}

#[test]
fn tables_merge_equivalent_windows_under_one_canonical_entry() {
    let mut table: WindowTable<StripsWindow> = WindowTable::new(TableMeta::new("strips", 4));
    table.insert(&flight_window_a());
    table.insert(&flight_window_b());
    assert_eq!(table.len(), 1);
    assert_eq!(table.total_count(), 2);
    assert_eq!(table.lookup(&flight_window_b()), Some(2));

    let mut other = flight_window_a();
    other.actions[0].schema = "drive".to_string();
    assert_eq!(table.lookup(&other), None);
    table.insert(&other);
    assert_eq!(table.len(), 2);
}

#[test]
fn finalize_orders_by_count_then_key_and_threshold_prunes() {
    let mut table: WindowTable<GridWindow> = WindowTable::new(TableMeta::new("grid", 3));
    let mut m1 = vec![false; 9];
    m1[1] = true;
    let mut m2 = vec![false; 9];
    m2[3] = true;
    let rare = GridWindow::new(3, m1, Dir::Up);
    let common = GridWindow::new(3, m2, Dir::Up);
    table.insert(&rare);
    table.insert(&common);
    table.insert(&common.rotate_cw());
    table.insert(&common);
    table.finalize();
    assert_eq!(table.entries()[0].1, 3, "highest count first");
    assert_eq!(table.entries()[1].1, 1);

    let pruned = table.thresholded(2);
    assert_eq!(pruned.len(), 1);
    assert_eq!(pruned.meta.threshold, 2);
    assert_eq!(pruned.lookup(&rare), None);
    assert_eq!(pruned.lookup(&common), Some(3));
}

#[test]
fn grid_tables_round_trip_byte_for_byte() {
    let cfg = GridTableConfig {
        instances: 60,
        width: 9,
        height: 9,
        wall_frequency: 0.3,
        ..GridTableConfig::new(60, 11)
    };
    let table = build_grid_table(&cfg);
    assert!(!table.is_empty(), "60 mazes must yield at least one pattern");
    let text = table.to_text();
    let parsed: WindowTable<GridWindow> = WindowTable::parse(&text).unwrap();
    assert_eq!(parsed.to_text(), text, "serialization is byte-stable");
    assert_eq!(parsed.len(), table.len());
    assert_eq!(parsed.meta, table.meta);
    for (w, count) in table.entries() {
        assert_eq!(parsed.lookup(w), Some(*count));
    }
}

#[test]
fn strips_tables_round_trip_byte_for_byte() {
    let cfg = StripsTableConfig { window_size: 3, ..StripsTableConfig::new(30, 5) };
    let table = build_strips_table(&cfg, |seed| air_cargo_task(1, 2, 2, seed));
    assert!(!table.is_empty(), "30 cargo tasks must yield at least one pattern");
    let text = table.to_text();
    let parsed: WindowTable<StripsWindow> = WindowTable::parse(&text).unwrap();
    assert_eq!(parsed.to_text(), text, "serialization is byte-stable");
    assert_eq!(parsed.meta, table.meta);
    for (w, count) in table.entries() {
        assert_eq!(parsed.lookup(w), Some(*count));
    }
}

#[test]
fn unthresholded_counts_add_up_to_the_contributing_instances() {
    let cfg = GridTableConfig {
        instances: 80,
        width: 9,
        height: 9,
        wall_frequency: 0.3,
        ..GridTableConfig::new(80, 23)
    };
    let table = build_grid_table(&cfg);
    assert_eq!(table.meta.threshold, 0);
    assert_eq!(table.total_count(), table.meta.contributing);
    assert!(
        table.meta.contributing + table.meta.skipped_short + table.meta.skipped_unsolved
            <= cfg.instances
    );
}

#[test]
fn table_building_agrees_with_the_single_wall_oracle() {
    // With a single training instance, the table has exactly one entry
    // iff some single wall on the optimal path strictly raises the cost.
    for base_seed in 0..15u64 {
        let cfg = GridTableConfig {
            instances: 1,
            width: 7,
            height: 7,
            wall_frequency: 0.25,
            ..GridTableConfig::new(1, base_seed)
        };
        let table = build_grid_table(&cfg);
        let maze_seed = instance_seed(base_seed, 0);
        let Ok(maze) = generate_maze(7, 7, 0.25, maze_seed) else {
            assert_eq!(table.meta.skipped_unsolved, 1);
            continue;
        };
        let oracle =
            brute_force_attack_grid(&maze, GridHeuristic::Euclidean, 1, 100_000).unwrap();
        assert_eq!(
            table.len(),
            usize::from(oracle.success),
            "seed {base_seed}: table entry iff a damaging wall exists"
        );
    }
}

#[test]
fn table_text_parsing_rejects_corrupted_input() {
    let cfg = GridTableConfig {
        instances: 20,
        width: 9,
        height: 9,
        wall_frequency: 0.3,
        ..GridTableConfig::new(20, 3)
    };
    let table = build_grid_table(&cfg);
    let text = table.to_text();

    let wrong_magic = text.replacen("advplan-window-table v1", "window-table v2", 1);
    assert!(WindowTable::<GridWindow>::parse(&wrong_magic).is_err());

    assert!(matches!(
        WindowTable::<StripsWindow>::parse(&text),
        Err(TableError::FlavorMismatch { .. })
    ));

    let bad_count = text.replacen("count ", "count x", 1);
    assert!(WindowTable::<GridWindow>::parse(&bad_count).is_err());

    let truncated = &text[..text.rfind("count").unwrap()];
    assert!(
        WindowTable::<GridWindow>::parse(truncated).is_err(),
        "entry total must match the header"
    );
}

// A 3×3 window always has the approached-from cell free (the baseline path
// ran through it), so after merging rotations the table draws from at most
// 2^7 = 128 distinct patterns. A healthy 500-instance build should land
// well inside that cap while still showing broad variety.
#[test]
fn euclidean_table_at_threshold_zero_shows_broad_pattern_variety() {
    let cfg = GridTableConfig::new(500, 97);
    assert_eq!((cfg.width, cfg.height), (15, 15));
    assert_eq!(cfg.heuristic, GridHeuristic::Euclidean);
    let table = build_grid_table(&cfg);
    let entries = table.len();
    assert!(entries <= 128, "rotation classes with a free behind-cell cap at 128, got {entries}");
    assert!(
        (60..=128).contains(&entries),
        "500 default mazes should produce dozens of distinct patterns, got {entries}"
    );
    assert!(
        table.meta.contributing >= 350,
        "most random mazes admit a cost-increasing wall, got {}",
        table.meta.contributing
    );
    assert_eq!(table.total_count(), table.meta.contributing);
}

#[test]
fn manhattan_table_at_threshold_ten_keeps_only_the_recurring_patterns() {
    let cfg = GridTableConfig {
        heuristic: GridHeuristic::Manhattan,
        threshold: 10,
        ..GridTableConfig::new(500, 97)
    };
    let table = build_grid_table(&cfg);
    let entries = table.len();
    assert!(
        (8..=63).contains(&entries),
        "pruning rare patterns should leave roughly a dozen, got {entries}"
    );
    assert!(table.entries().iter().all(|(_, c)| *c >= 10));
    let unpruned = build_grid_table(&GridTableConfig {
        heuristic: GridHeuristic::Manhattan,
        threshold: 0,
        ..GridTableConfig::new(500, 97)
    });
    assert!(entries < unpruned.len(), "threshold 10 must actually drop the long tail");
    assert_eq!(
        unpruned.entries().iter().filter(|(_, c)| *c >= 10).count(),
        entries
    );
}

// ---------------------------------------------------------------------
// Properties.

fn arb_grid_window() -> impl Strategy<Value = GridWindow> {
    (proptest::collection::vec(any::<bool>(), 9), 0..4u8).prop_map(|(mut mask, d)| {
        mask[4] = false;
        let approach = [Dir::Up, Dir::Right, Dir::Down, Dir::Left][d as usize];
        GridWindow::new(3, mask, approach)
    })
}

/// Windows over objects o0..o5 (type alternates), two schemas, two
/// predicate names.
fn arb_strips_window() -> impl Strategy<Value = StripsWindow> {
    let atom = (prop_oneof![Just("p"), Just("q")], proptest::collection::vec(0..6usize, 1..=2));
    let state = proptest::collection::vec(atom, 0..4usize);
    let action =
        (prop_oneof![Just("go"), Just("swap")], proptest::collection::vec(0..6usize, 1..=2));
    (2..=4usize)
        .prop_flat_map(move |n| {
            (
                proptest::collection::vec(state.clone(), n),
                proptest::collection::vec(action.clone(), n - 1),
            )
        })
        .prop_map(|(states, actions)| {
            let obj = |i: usize| format!("o{i}");
            let states: Vec<State> = states
                .into_iter()
                .map(|preds| {
                    State::from_predicates(preds.into_iter().map(|(name, args)| {
                        Predicate::new(name, &args.iter().map(|&i| obj(i)).collect::<Vec<_>>()
                            .iter().map(String::as_str).collect::<Vec<_>>())
                    }))
                })
                .collect();
            let actions: Vec<WindowAction> = actions
                .into_iter()
                .map(|(schema, args)| WindowAction {
                    schema: schema.to_string(),
                    args: args.into_iter().map(obj).collect(),
                })
                .collect();
            let mut w = StripsWindow { states, actions, obj_types: BTreeMap::new() };
            w.obj_types = w
                .objects()
                .into_iter()
                .map(|o| {
                    let i: usize = o[1..].parse().unwrap();
                    (o.to_string(), format!("t{}", i % 2))
                })
                .collect();
            w
        })
}

/// A type-preserving bijection on o0..o5: evens permute among evens,
/// odds among odds.
fn arb_renaming() -> impl Strategy<Value = BTreeMap<String, String>> {
    (0..6usize, 0..6usize).prop_map(|(pe, po)| {
        fn perm3(k: usize) -> [usize; 3] {
            let mut items = [0, 1, 2];
            let mut out = [0; 3];
            let mut k = k;
            for i in (1..=3).rev() {
                let j = k % i;
                k /= i;
                out[3 - i] = items[j];
                for x in j..i - 1 {
                    items[x] = items[x + 1];
                }
            }
            out
        }
        let evens = perm3(pe);
        let odds = perm3(po);
        let mut map = BTreeMap::new();
        for i in 0..3 {
            map.insert(format!("o{}", 2 * i), format!("o{}", 2 * evens[i]));
            map.insert(format!("o{}", 2 * i + 1), format!("o{}", 2 * odds[i] + 1));
        }
        map
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn equivalence_is_reflexive(w in arb_strips_window()) {
        let witness = strips_windows_equivalent(&w, &w);
        prop_assert!(witness.is_some());
        let f = witness.unwrap();
        prop_assert_eq!(
            w.rename(&f).prune_types().render(),
            w.clone().prune_types().render()
        );
    }

    #[test]
    fn equivalence_is_symmetric(a in arb_strips_window(), b in arb_strips_window()) {
        let ab = strips_windows_equivalent(&a, &b);
        let ba = strips_windows_equivalent(&b, &a);
        prop_assert_eq!(ab.is_some(), ba.is_some());
        prop_assert_eq!(ab.is_some(), a.canonical_key() == b.canonical_key());
    }

    #[test]
    fn equivalence_survives_renaming(w in arb_strips_window(), f in arb_renaming()) {
        let renamed = w.rename(&f);
        let witness = strips_windows_equivalent(&w, &renamed);
        prop_assert!(witness.is_some(), "renamed copy must stay equivalent");
        prop_assert_eq!(w.canonical_key(), renamed.canonical_key());
    }

    #[test]
    fn canonicalization_is_idempotent(w in arb_strips_window()) {
        let c = w.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert_eq!(c.render(), w.canonical_key());
    }

    #[test]
    fn normalization_is_idempotent_and_preserves_equivalence_keys(w in arb_strips_window()) {
        let n = normalize_window(&w);
        prop_assert_eq!(normalize_window(&n), n.clone());
        // Normalizing both sides of an equivalent pair keeps them equivalent.
        let w2 = w.rename(&BTreeMap::from([
            ("o0".to_string(), "o2".to_string()),
            ("o2".to_string(), "o0".to_string()),
        ]));
        prop_assert_eq!(
            normalize_window(&w).canonical_key(),
            normalize_window(&w2).canonical_key()
        );
    }

    #[test]
    fn grid_window_rotations_share_their_canonical_form(w in arb_grid_window()) {
        let mut cur = w.clone();
        for turns in 0..4u8 {
            prop_assert_eq!(cur.canonical_key(), w.canonical_key());
            prop_assert!(grid_windows_equivalent(&w, &cur).is_some());
            prop_assert_eq!(grid_windows_equivalent(&w, &cur).unwrap(), turns % 4);
            cur = cur.rotate_cw();
        }
        let c = w.canonical();
        prop_assert_eq!(c.canonical(), c);
    }

    #[test]
    fn strips_window_text_round_trips(w in arb_strips_window()) {
        let text = TableWindow::render(&w);
        let lines: Vec<&str> = text.lines().collect();
        let parsed = <StripsWindow as TableWindow>::parse(&lines, 1).unwrap();
        prop_assert_eq!(parsed, w);
    }
}
