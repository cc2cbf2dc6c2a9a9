//! Bundled STRIPS domains and seeded instance generators, used by the
//! benchmark harness and throughout the test suite.
//!
//! Two domains ship with the crate: an air-cargo domain (planes ferry
//! cargo between airports) and the classic four-operator blocks world.
//! Both generators are deterministic in their seed.

use crate::strips::{parse_task, Task};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::fmt::Write as _;

/// Air-cargo domain: LOAD / UNLOAD / FLY.
pub fn air_cargo_domain() -> &'static str {
    r#"(define (domain air-cargo)
  (:requirements :strips :typing)
  (:types cargo plane airport)
  (:predicates (At ?x ?a) (In ?c ?p))
  (:action LOAD
    :parameters (?c - cargo ?p - plane ?a - airport)
    :precondition (and (At ?c ?a) (At ?p ?a))
    :effect (and (In ?c ?p) (not (At ?c ?a))))
  (:action UNLOAD
    :parameters (?c - cargo ?p - plane ?a - airport)
    :precondition (and (In ?c ?p) (At ?p ?a))
    :effect (and (At ?c ?a) (not (In ?c ?p))))
  (:action FLY
    :parameters (?p - plane ?from - airport ?to - airport)
    :precondition (At ?p ?from)
    :effect (and (At ?p ?to) (not (At ?p ?from)))))
"#
}

/// The two-plane cargo swap: c1 must move SFO→JFK while c2 moves JFK→SFO.
/// Small enough to solve exhaustively, rich enough to have 24 grounded
/// actions — the standard fixture for planner and attack tests.
pub fn air_cargo_swap_problem() -> &'static str {
    r#"(define (problem cargo-swap)
  (:domain air-cargo)
  (:objects p1 p2 - plane c1 c2 - cargo SFO JFK - airport)
  (:init (At c1 SFO) (At c2 JFK) (At p1 SFO) (At p2 JFK))
  (:goal (and (At c1 JFK) (At c2 SFO))))
"#
}

/// Parsed and grounded cargo-swap task.
pub fn air_cargo_swap_task() -> Task {
    parse_task(air_cargo_domain(), air_cargo_swap_problem())
        .expect("bundled air-cargo fixture parses")
        .ground()
}

/// Random air-cargo problem: planes and cargo start at random airports,
/// and every cargo's goal is a different airport than where it starts.
/// Solvable whenever there is at least one plane.
pub fn air_cargo_problem_text(planes: usize, cargos: usize, airports: usize, seed: u64) -> String {
    assert!(planes >= 1 && cargos >= 1 && airports >= 2, "need ≥1 plane, ≥1 cargo, ≥2 airports");
    let mut rng = StdRng::seed_from_u64(seed);
    let apt = |i: usize| format!("apt{}", i + 1);

    let mut out = String::new();
    let _ = writeln!(out, "(define (problem cargo-{planes}-{cargos}-{airports}-{seed})");
    let _ = writeln!(out, "  (:domain air-cargo)");
    out.push_str("  (:objects");
    for i in 0..planes {
        let _ = write!(out, " p{}", i + 1);
    }
    out.push_str(" - plane");
    for i in 0..cargos {
        let _ = write!(out, " c{}", i + 1);
    }
    out.push_str(" - cargo");
    for i in 0..airports {
        let _ = write!(out, " {}", apt(i));
    }
    out.push_str(" - airport)\n  (:init");
    for i in 0..planes {
        let _ = write!(out, " (At p{} {})", i + 1, apt(rng.random_range(0..airports)));
    }
    let mut cargo_at = Vec::with_capacity(cargos);
    for i in 0..cargos {
        let at = rng.random_range(0..airports);
        cargo_at.push(at);
        let _ = write!(out, " (At c{} {})", i + 1, apt(at));
    }
    out.push_str(")\n  (:goal (and");
    for (i, &at) in cargo_at.iter().enumerate() {
        let mut dest = rng.random_range(0..airports);
        if dest == at {
            dest = (dest + 1) % airports;
        }
        let _ = write!(out, " (At c{} {})", i + 1, apt(dest));
    }
    out.push_str(")))\n");
    out
}

/// Parsed and grounded random air-cargo task.
pub fn air_cargo_task(planes: usize, cargos: usize, airports: usize, seed: u64) -> Task {
    parse_task(
        air_cargo_domain(),
        &air_cargo_problem_text(planes, cargos, airports, seed),
    )
    .expect("generated air-cargo problem parses")
    .ground()
}

/// Four-operator blocks world: pick-up / put-down / stack / unstack.
pub fn blocks_domain() -> &'static str {
    r#"(define (domain blocks)
  (:requirements :strips :typing)
  (:types block)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x))
  (:action pick-up
    :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (holding ?x) (not (ontable ?x)) (not (clear ?x)) (not (handempty))))
  (:action put-down
    :parameters (?x - block)
    :precondition (holding ?x)
    :effect (and (ontable ?x) (clear ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (on ?x ?y) (clear ?x) (handempty) (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (on ?x ?y)) (not (clear ?x)) (not (handempty)))))
"#
}

/// Random stack layout: block index → list of towers, bottom first.
fn random_towers(n: usize, rng: &mut StdRng) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    // Fisher-Yates with the generator's own stream, so layouts are
    // reproducible from the seed alone.
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut towers: Vec<Vec<usize>> = Vec::new();
    for b in order {
        if towers.is_empty() || rng.random_bool(0.45) {
            towers.push(vec![b]);
        } else {
            let t = rng.random_range(0..towers.len());
            towers[t].push(b);
        }
    }
    towers
}

fn tower_atoms(towers: &[Vec<usize>]) -> Vec<String> {
    let name = |b: usize| format!("b{}", b + 1);
    let mut atoms = Vec::new();
    for tower in towers {
        atoms.push(format!("(ontable {})", name(tower[0])));
        for w in tower.windows(2) {
            atoms.push(format!("(on {} {})", name(w[1]), name(w[0])));
        }
    }
    atoms
}

/// Random blocks problem: a random initial tower layout and a fully
/// specified random goal layout (re-drawn if it happens to equal the
/// initial one, so the baseline plan is never empty).
pub fn blocks_problem_text(blocks: usize, seed: u64) -> String {
    assert!(blocks >= 2, "need at least 2 blocks");
    let mut rng = StdRng::seed_from_u64(seed);
    let init_towers = random_towers(blocks, &mut rng);
    let init_atoms = tower_atoms(&init_towers);
    let init_set: std::collections::BTreeSet<&String> = init_atoms.iter().collect();
    let goal_atoms = loop {
        let goal_towers = random_towers(blocks, &mut rng);
        let atoms = tower_atoms(&goal_towers);
        if atoms.iter().collect::<std::collections::BTreeSet<_>>() != init_set {
            break atoms;
        }
    };

    let mut out = String::new();
    let _ = writeln!(out, "(define (problem blocks-{blocks}-{seed})");
    let _ = writeln!(out, "  (:domain blocks)");
    out.push_str("  (:objects");
    for b in 0..blocks {
        let _ = write!(out, " b{}", b + 1);
    }
    out.push_str(" - block)\n  (:init (handempty)");
    for a in &init_atoms {
        let _ = write!(out, " {a}");
    }
    for tower in &init_towers {
        let _ = write!(out, " (clear b{})", tower.last().unwrap() + 1);
    }
    out.push_str(")\n  (:goal (and");
    for a in &goal_atoms {
        let _ = write!(out, " {a}");
    }
    out.push_str(")))\n");
    out
}

/// Parsed and grounded random blocks task.
pub fn blocks_task(blocks: usize, seed: u64) -> Task {
    parse_task(blocks_domain(), &blocks_problem_text(blocks, seed))
        .expect("generated blocks problem parses")
        .ground()
}
