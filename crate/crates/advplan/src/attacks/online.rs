//! Mid-run wall placement against a replanning grid agent.
//!
//! The agent navigates with incremental replanning and discovers walls by
//! sensing. The adversary watches it, anticipates the next cell it will
//! enter, and — whenever the surroundings of that cell match a learned
//! pattern — drops a wall there first. Each round is one tick: the
//! adversary moves, then the agent moves.

use super::{AttackError, AttackReport, Change, HeuristicSpec, Knowledge, Mode, ThreatModel};
use crate::grid::{astar_cost, Cell, Dir, DStarLite, Grid, GridHeuristic};
use crate::strips::PlanCost;
use crate::windows::{extract_grid_window, GridWindow, WindowTable};
use serde::{Deserialize, Serialize};

/// How much of the world the agent perceives each tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SenseMode {
    /// Every placement is announced to the agent immediately.
    Full,
    /// The agent only notices walls within one cell of its position
    /// (diagonals included).
    Adjacent,
}

/// One line of the run transcript.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TickEvent {
    pub tick: u32,
    /// "adversary" or "agent".
    pub actor: &'static str,
    /// What happened: "wall", "illegal-skip", "no-match", "no-predict",
    /// "idle", "move", "stuck", "goal".
    pub event: &'static str,
    pub cell: Option<Cell>,
    /// Steps the agent has walked so far.
    pub steps: u64,
}

/// Full record of one online run.
#[derive(Debug, Clone)]
pub struct Transcript {
    pub events: Vec<TickEvent>,
    /// Cells entered by the agent, in order (start excluded).
    pub walked: Vec<Cell>,
    /// The world after all placements.
    pub final_grid: Grid,
}

/// Runs the tick loop on `world` and reports how far the walk was pushed
/// above the undisturbed shortest path. The attacked cost is the number
/// of steps actually walked — or unbounded if the agent got sealed off.
///
/// Placements aimed at the goal cell are skipped as illegal without
/// spending budget. The window size probed is the one the table was
/// built with; an empty table yields an unperturbed walk.
pub fn online_attack(
    world: &Grid,
    agent_h: GridHeuristic,
    table: &WindowTable<GridWindow>,
    threat: &ThreatModel,
    sense: SenseMode,
) -> Result<(AttackReport, Transcript), AttackError> {
    threat.validate().map_err(AttackError::Threat)?;
    if threat.mode != Mode::Online {
        return Err(AttackError::WrongMode { expected: Mode::Online });
    }
    let h_adv = match threat.h_adv {
        HeuristicSpec::Grid(h) => h,
        HeuristicSpec::Strips(_) => return Err(AttackError::WrongHeuristicFlavor),
    };
    let Some(baseline) = astar_cost(world, world.start, world.goal, agent_h) else {
        return Err(AttackError::BaselineUnsolvable);
    };
    let baseline = PlanCost::Finite(baseline as u64);

    let n = table.meta.window_size;
    let mut world_now = world.clone();
    let mut agent = DStarLite::new(world.clone(), agent_h);
    let mut events: Vec<TickEvent> = Vec::new();
    let mut walked: Vec<Cell> = Vec::new();
    let mut removed: Vec<Change> = Vec::new();
    let mut illegal_skipped: u64 = 0;
    let mut steps: u64 = 0;
    let mut disconnected = false;

    // Generous cap so a defect can't spin forever; a replanning agent
    // with at most MAX_BUDGET walls finishes far below it.
    let tick_cap = (world.width() as u32) * (world.height() as u32) * 8 + 64;
    let mut tick: u32 = 0;

    while agent.position() != world.goal {
        tick += 1;
        if tick > tick_cap {
            break;
        }

        // Adversary phase.
        if (removed.len() as u32) < threat.budget {
            let current = agent.position();
            let predicted = match threat.knowledge {
                Knowledge::AgentHeuristicAndInformed => agent.peek_next(),
                Knowledge::AgentHeuristic | Knowledge::BlackBox => {
                    super::predict_next_cell(&world_now, current, world.goal, h_adv)
                }
            };
            match predicted {
                None => events.push(TickEvent {
                    tick,
                    actor: "adversary",
                    event: "no-predict",
                    cell: None,
                    steps,
                }),
                Some(p) => {
                    let approach = Dir::between(current, p)
                        .expect("predicted cell is adjacent to the agent");
                    let window = extract_grid_window(&world_now, p, n, approach);
                    if table.lookup(&window).is_some() {
                        if p == world.goal {
                            illegal_skipped += 1;
                            events.push(TickEvent {
                                tick,
                                actor: "adversary",
                                event: "illegal-skip",
                                cell: Some(p),
                                steps,
                            });
                        } else {
                            world_now.set_wall(p);
                            removed.push(Change::Wall(p));
                            match sense {
                                SenseMode::Full => {
                                    agent.observe_wall(p).expect("placement was vetted")
                                }
                                SenseMode::Adjacent => {
                                    agent.sense_adjacent(&world_now);
                                }
                            }
                            events.push(TickEvent {
                                tick,
                                actor: "adversary",
                                event: "wall",
                                cell: Some(p),
                                steps,
                            });
                        }
                    } else {
                        events.push(TickEvent {
                            tick,
                            actor: "adversary",
                            event: "no-match",
                            cell: Some(p),
                            steps,
                        });
                    }
                }
            }
        } else {
            events.push(TickEvent { tick, actor: "adversary", event: "idle", cell: None, steps });
        }

        // Agent phase: sense, then move.
        if sense == SenseMode::Adjacent {
            agent.sense_adjacent(&world_now);
        }
        match agent.step() {
            Some(c) => {
                steps += 1;
                walked.push(c);
                let event = if c == world.goal { "goal" } else { "move" };
                events.push(TickEvent { tick, actor: "agent", event, cell: Some(c), steps });
            }
            None => {
                disconnected = true;
                events.push(TickEvent {
                    tick,
                    actor: "agent",
                    event: "stuck",
                    cell: Some(agent.position()),
                    steps,
                });
                break;
            }
        }
    }

    let attacked = if disconnected { PlanCost::Infinite } else { PlanCost::Finite(steps) };
    let mut report = AttackReport::new(baseline, attacked, removed);
    report.illegal_skipped = illegal_skipped;
    let transcript = Transcript { events, walked, final_grid: world_now };
    Ok((report, transcript))
}
