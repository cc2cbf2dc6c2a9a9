//! Planning toolkit with an adversarial bent.
//!
//! The library has two planning substrates — a STRIPS subset with forward
//! state-space search, and 4-connected grids with D* Lite incremental
//! replanning — plus machinery for attacking both: finding small sets of
//! grounded actions to remove (or walls to place) that maximally increase
//! the agent's plan cost, ideally rendering the task unsolvable.
//!
//! Attacks come in two strengths: an exhaustive brute-force oracle for
//! small instances, and a pattern-table heuristic that learns local
//! "windows" around effective changes offline and replays them online
//! against a moving agent, or offline against a task description.

pub mod attacks;
pub mod domains;
pub mod grid;
pub mod harness;
pub mod planner;
pub mod reduction;
pub mod strips;
mod util;
pub mod windows;

pub use grid::{Cell, Grid};
pub use planner::{solve, SearchConfig, SearchOutcome};
pub use strips::{GroundedAction, Plan, PlanCost, Predicate, State, Task};
