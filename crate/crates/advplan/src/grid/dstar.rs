//! D* Lite incremental shortest-path maintenance for an agent walking a
//! grid while walls appear mid-run.
//!
//! The agent keeps `g` and `rhs` estimates per cell and a priority queue
//! keyed by `(min(g, rhs) + h + k_m, min(g, rhs))`. When a wall appears,
//! only the affected vertices are recomputed; the `k_m` offset absorbs
//! the heuristic drift as the agent moves so stale keys stay comparable.
//! Queue entries are invalidated lazily through a per-cell version
//! counter instead of being removed.

use super::{astar_cost, Cell, Dir, Grid, GridHeuristic};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

const INF: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64, f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .total_cmp(&other.0)
            .then_with(|| self.1.total_cmp(&other.1))
    }
}

/// Max-heap entry; `Reverse` semantics folded in so the smallest key,
/// then the canonically smallest cell, pops first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Entry {
    key: Key,
    cell: Cell,
    version: u64,
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .cmp(&self.key)
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WallError {
    OutOfBounds(Cell),
    OnAgent(Cell),
    OnGoal(Cell),
    AlreadyWalled(Cell),
}

impl fmt::Display for WallError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WallError::OutOfBounds(c) => write!(f, "wall out of bounds at {c}"),
            WallError::OnAgent(c) => write!(f, "wall on the agent's cell {c}"),
            WallError::OnGoal(c) => write!(f, "wall on the goal cell {c}"),
            WallError::AlreadyWalled(c) => write!(f, "cell {c} is already a wall"),
        }
    }
}

impl std::error::Error for WallError {}

/// D* Lite search state. The agent owns its own copy of the grid and
/// learns about new walls through [`DStarLite::observe_wall`].
pub struct DStarLite {
    grid: Grid,
    h: GridHeuristic,
    g: Vec<u32>,
    rhs: Vec<u32>,
    version: Vec<u64>,
    queue: BinaryHeap<Entry>,
    start: Cell,
    last: Cell,
    k_m: f64,
    next_version: u64,
    /// Vertex recomputations across the lifetime, for benchmarks.
    pub updates: u64,
}

impl DStarLite {
    /// Set up the search from the grid's start toward its goal and run the
    /// initial computation.
    pub fn new(grid: Grid, h: GridHeuristic) -> DStarLite {
        let n = (grid.width() * grid.height()) as usize;
        let start = grid.start;
        let goal = grid.goal;
        let mut d = DStarLite {
            grid,
            h,
            g: vec![INF; n],
            rhs: vec![INF; n],
            version: vec![0; n],
            queue: BinaryHeap::new(),
            start,
            last: start,
            k_m: 0.0,
            next_version: 1,
            updates: 0,
        };
        let gi = d.idx(goal);
        d.rhs[gi] = 0;
        d.push(goal);
        d.compute_shortest_path();
        d
    }

    fn idx(&self, c: Cell) -> usize {
        (c.row * self.grid.width() + c.col) as usize
    }

    fn key(&self, c: Cell) -> Key {
        let i = self.idx(c);
        let m = self.g[i].min(self.rhs[i]);
        if m == INF {
            Key(f64::INFINITY, f64::INFINITY)
        } else {
            let m = m as f64;
            Key(m + self.h.eval(self.start, c) + self.k_m, m)
        }
    }

    /// Queue (or re-queue) `c` under a fresh version; older queue entries
    /// for `c` become stale and are skipped on pop.
    fn push(&mut self, c: Cell) {
        let i = self.idx(c);
        let v = self.next_version;
        self.next_version += 1;
        self.version[i] = v;
        self.queue.push(Entry { key: self.key(c), cell: c, version: v });
    }

    /// Drop `c` from the queue (lazily, by bumping its version).
    fn invalidate(&mut self, c: Cell) {
        let i = self.idx(c);
        self.version[i] = self.next_version;
        self.next_version += 1;
    }

    fn top(&mut self) -> Option<Entry> {
        while let Some(e) = self.queue.peek().copied() {
            if self.version[self.idx(e.cell)] == e.version {
                return Some(e);
            }
            self.queue.pop();
        }
        None
    }

    fn update_vertex(&mut self, c: Cell) {
        self.updates += 1;
        let i = self.idx(c);
        if c != self.grid.goal {
            // rhs = 1 + min over free successors of g, INF when isolated.
            let mut best = INF;
            for n in self.grid.free_neighbors(c) {
                let gn = self.g[self.idx(n)];
                if gn != INF {
                    best = best.min(gn + 1);
                }
            }
            self.rhs[i] = best;
        }
        if self.g[i] != self.rhs[i] {
            self.push(c);
        } else {
            self.invalidate(c);
        }
    }

    fn compute_shortest_path(&mut self) {
        loop {
            let si = self.idx(self.start);
            let start_key = self.key(self.start);
            let Some(top) = self.top() else { break };
            if top.key >= start_key && self.rhs[si] == self.g[si] {
                break;
            }
            let c = top.cell;
            let i = self.idx(c);
            let fresh = self.key(c);
            if top.key < fresh {
                // Key drifted (k_m grew or estimates moved): re-push.
                self.queue.pop();
                self.push(c);
            } else if self.g[i] > self.rhs[i] {
                // Overconsistent: settle.
                self.g[i] = self.rhs[i];
                self.queue.pop();
                self.invalidate(c);
                for n in self.grid.free_neighbors(c) {
                    self.update_vertex(n);
                }
            } else {
                // Underconsistent: raise, then repair the neighborhood.
                self.g[i] = INF;
                self.update_vertex(c);
                for n in self.grid.free_neighbors(c) {
                    self.update_vertex(n);
                }
            }
        }
    }

    /// The agent's current cell.
    pub fn position(&self) -> Cell {
        self.start
    }

    /// Cost-to-goal from the agent's current cell, `None` when the goal is
    /// currently unreachable.
    pub fn remaining_cost(&self) -> Option<u32> {
        let r = self.rhs[self.idx(self.start)];
        if r == INF {
            None
        } else {
            Some(r)
        }
    }

    /// The move the agent would take next: the free successor minimizing
    /// `1 + g`, ties in canonical (row, col) order. `None` at the goal or
    /// when stuck.
    pub fn peek_next(&self) -> Option<Cell> {
        if self.start == self.grid.goal {
            return None;
        }
        let mut best: Option<(u32, Cell)> = None;
        for n in self.grid.free_neighbors(self.start) {
            let gn = self.g[self.idx(n)];
            if gn == INF {
                continue;
            }
            // free_neighbors is already in canonical order, so strict
            // improvement keeps the canonical argmin.
            if best.is_none_or(|(b, _)| gn + 1 < b) {
                best = Some((gn + 1, n));
            }
        }
        best.map(|(_, c)| c)
    }

    /// Advance one step along the current policy. Returns the new cell,
    /// or `None` when already at the goal or no move exists.
    pub fn step(&mut self) -> Option<Cell> {
        let next = self.peek_next()?;
        self.start = next;
        Some(next)
    }

    /// Tell the agent a wall has appeared. Recomputes the policy
    /// incrementally; `k_m` absorbs the heuristic shift since the last
    /// observation point.
    pub fn observe_wall(&mut self, c: Cell) -> Result<(), WallError> {
        if !self.grid.in_bounds(c) {
            return Err(WallError::OutOfBounds(c));
        }
        if c == self.start {
            return Err(WallError::OnAgent(c));
        }
        if c == self.grid.goal {
            return Err(WallError::OnGoal(c));
        }
        if self.grid.is_wall(c) {
            return Ok(());
        }
        self.k_m += self.h.eval(self.last, self.start);
        self.last = self.start;
        let neighbors = self.grid.free_neighbors(c);
        self.grid.set_wall(c);
        // The walled cell no longer routes anything.
        let i = self.idx(c);
        self.g[i] = INF;
        self.rhs[i] = INF;
        self.invalidate(c);
        for n in neighbors {
            self.update_vertex(n);
        }
        self.compute_shortest_path();
        Ok(())
    }

    /// Agent-side sensing: scan the 8 cells within Chebyshev distance 1 of
    /// the current position against `world`, reporting any wall the agent
    /// did not know about yet. Returns how many new walls were observed.
    pub fn sense_adjacent(&mut self, world: &Grid) -> usize {
        let mut seen = Vec::new();
        for dr in -1..=1 {
            for dc in -1..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let c = Cell::new(self.start.row + dr, self.start.col + dc);
                if world.in_bounds(c) && world.is_wall(c) && !self.grid.is_wall(c) {
                    seen.push(c);
                }
            }
        }
        let count = seen.len();
        for c in seen {
            // Known in-bounds, not the agent's own cell, not the goal
            // (the attack layer never walls the goal).
            let _ = self.observe_wall(c);
        }
        count
    }

    /// The agent's current belief about the world.
    pub fn known_grid(&self) -> &Grid {
        &self.grid
    }
}

/// Place a wall in a world grid, rejecting placements that would corrupt
/// the run: out of bounds, occupied by the agent, the goal itself, or a
/// cell that is already a wall.
pub fn add_wall(world: &mut Grid, c: Cell, agent_at: Cell) -> Result<(), WallError> {
    if !world.in_bounds(c) {
        return Err(WallError::OutOfBounds(c));
    }
    if c == agent_at {
        return Err(WallError::OnAgent(c));
    }
    if c == world.goal {
        return Err(WallError::OnGoal(c));
    }
    if world.is_wall(c) {
        return Err(WallError::AlreadyWalled(c));
    }
    world.set_wall(c);
    Ok(())
}

/// Reference check used by tests and benchmarks: after any sequence of
/// observations, the incremental cost must equal a fresh A* on the
/// agent's known grid.
pub fn matches_fresh_astar(d: &DStarLite) -> bool {
    let fresh = astar_cost(d.known_grid(), d.position(), d.known_grid().goal, d.h);
    d.remaining_cost() == fresh
}

/// Direction helper re-exported for window extraction call sites.
pub fn incoming_dir(path: &[Cell], i: usize) -> Option<Dir> {
    if i == 0 || i >= path.len() {
        return None;
    }
    Dir::between(path[i - 1], path[i])
}
