//! 4-connected grid worlds: seeded maze generation, grid heuristics,
//! a deterministic A*, and D* Lite incremental replanning (in [`dstar`]).
//!
//! Cells are (row, col) pairs and every tie in the toolkit breaks in
//! row-major order, i.e. the derived lexicographic `Ord` below. The
//! ASCII interchange format is one row per line: `#` wall, `.` free,
//! `S` start, `G` goal.

mod dstar;

pub use dstar::{add_wall, incoming_dir, matches_fresh_astar, DStarLite, WallError};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: i32,
    pub col: i32,
}

impl Cell {
    pub fn new(row: i32, col: i32) -> Self {
        Cell { row, col }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// The four axis directions, used for window orientation. Rotation is
/// always clockwise quarter turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dir {
    Up,
    Down,
    Left,
    Right,
}

impl Dir {
    pub fn delta(self) -> (i32, i32) {
        match self {
            Dir::Up => (-1, 0),
            Dir::Down => (1, 0),
            Dir::Left => (0, -1),
            Dir::Right => (0, 1),
        }
    }

    pub fn rotate_cw(self) -> Dir {
        match self {
            Dir::Up => Dir::Right,
            Dir::Right => Dir::Down,
            Dir::Down => Dir::Left,
            Dir::Left => Dir::Up,
        }
    }

    /// Direction of travel from `a` to an adjacent cell `b`.
    pub fn between(a: Cell, b: Cell) -> Option<Dir> {
        match (b.row - a.row, b.col - a.col) {
            (-1, 0) => Some(Dir::Up),
            (1, 0) => Some(Dir::Down),
            (0, -1) => Some(Dir::Left),
            (0, 1) => Some(Dir::Right),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dir::Up => "up",
            Dir::Down => "down",
            Dir::Left => "left",
            Dir::Right => "right",
        }
    }

    pub fn from_name(s: &str) -> Option<Dir> {
        match s {
            "up" => Some(Dir::Up),
            "down" => Some(Dir::Down),
            "left" => Some(Dir::Left),
            "right" => Some(Dir::Right),
            _ => None,
        }
    }
}

/// A bounded 4-connected grid with walls, a start and a goal.
/// Out-of-bounds counts as wall for every movement purpose.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    width: i32,
    height: i32,
    walls: Vec<bool>,
    pub start: Cell,
    pub goal: Cell,
}

impl Grid {
    /// An open grid with start in the top-left and goal in the
    /// bottom-right corner.
    pub fn open(width: i32, height: i32) -> Grid {
        assert!(width >= 1 && height >= 1, "grid must be at least 1×1");
        Grid {
            width,
            height,
            walls: vec![false; (width * height) as usize],
            start: Cell::new(0, 0),
            goal: Cell::new(height - 1, width - 1),
        }
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.row >= 0 && c.row < self.height && c.col >= 0 && c.col < self.width
    }

    fn idx(&self, c: Cell) -> usize {
        (c.row * self.width + c.col) as usize
    }

    /// True for wall cells and anything out of bounds.
    pub fn is_wall(&self, c: Cell) -> bool {
        !self.in_bounds(c) || self.walls[self.idx(c)]
    }

    pub fn is_free(&self, c: Cell) -> bool {
        self.in_bounds(c) && !self.walls[self.idx(c)]
    }

    pub fn set_wall(&mut self, c: Cell) {
        assert!(self.in_bounds(c), "wall out of bounds: {c}");
        let i = self.idx(c);
        self.walls[i] = true;
    }

    pub fn wall_count(&self) -> usize {
        self.walls.iter().filter(|w| **w).count()
    }

    /// Free neighbors in canonical (row, col) order:
    /// up, left, right, down.
    pub fn free_neighbors(&self, c: Cell) -> Vec<Cell> {
        [
            Cell::new(c.row - 1, c.col),
            Cell::new(c.row, c.col - 1),
            Cell::new(c.row, c.col + 1),
            Cell::new(c.row + 1, c.col),
        ]
        .into_iter()
        .filter(|n| self.is_free(*n))
        .collect()
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |r| (0..self.width).map(move |c| Cell::new(r, c)))
    }

    /// Serialize to the ASCII format. Inverse of [`Grid::from_ascii`].
    pub fn to_ascii(&self) -> String {
        let mut out = String::with_capacity((self.width as usize + 1) * self.height as usize);
        for r in 0..self.height {
            for c in 0..self.width {
                let cell = Cell::new(r, c);
                let ch = if cell == self.start {
                    'S'
                } else if cell == self.goal {
                    'G'
                } else if self.is_wall(cell) {
                    '#'
                } else {
                    '.'
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }

    /// Parse the ASCII format: `#` wall, `.` free, exactly one `S` and one
    /// `G`, all rows the same length.
    pub fn from_ascii(text: &str) -> Result<Grid, AsciiGridError> {
        let rows: Vec<&str> = text.lines().filter(|l| !l.is_empty()).collect();
        if rows.is_empty() {
            return Err(AsciiGridError::new("empty grid"));
        }
        let width = rows[0].chars().count() as i32;
        let height = rows.len() as i32;
        let mut grid = Grid {
            width,
            height,
            walls: vec![false; (width * height) as usize],
            start: Cell::new(-1, -1),
            goal: Cell::new(-1, -1),
        };
        for (r, row) in rows.iter().enumerate() {
            if row.chars().count() as i32 != width {
                return Err(AsciiGridError::new(format!(
                    "row {} has length {}, expected {width}",
                    r + 1,
                    row.chars().count()
                )));
            }
            for (c, ch) in row.chars().enumerate() {
                let cell = Cell::new(r as i32, c as i32);
                match ch {
                    '#' => grid.set_wall(cell),
                    '.' => {}
                    'S' => {
                        if grid.start.row >= 0 {
                            return Err(AsciiGridError::new("multiple start cells"));
                        }
                        grid.start = cell;
                    }
                    'G' => {
                        if grid.goal.row >= 0 {
                            return Err(AsciiGridError::new("multiple goal cells"));
                        }
                        grid.goal = cell;
                    }
                    other => {
                        return Err(AsciiGridError::new(format!("unexpected character {other:?}")))
                    }
                }
            }
        }
        if grid.start.row < 0 {
            return Err(AsciiGridError::new("missing start cell S"));
        }
        if grid.goal.row < 0 {
            return Err(AsciiGridError::new("missing goal cell G"));
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsciiGridError {
    pub message: String,
}

impl AsciiGridError {
    fn new(message: impl Into<String>) -> Self {
        AsciiGridError { message: message.into() }
    }
}

impl fmt::Display for AsciiGridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad ascii grid: {}", self.message)
    }
}

impl std::error::Error for AsciiGridError {}

/// Distance estimators to the goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GridHeuristic {
    Euclidean,
    Manhattan,
}

impl GridHeuristic {
    pub fn eval(self, from: Cell, to: Cell) -> f64 {
        let dr = (from.row - to.row) as f64;
        let dc = (from.col - to.col) as f64;
        match self {
            GridHeuristic::Euclidean => (dr * dr + dc * dc).sqrt(),
            GridHeuristic::Manhattan => dr.abs() + dc.abs(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GridHeuristic::Euclidean => "euclidean",
            GridHeuristic::Manhattan => "manhattan",
        }
    }
}

/// Convenience free function mirroring [`GridHeuristic::eval`].
pub fn grid_heuristic(kind: GridHeuristic, from: Cell, to: Cell) -> f64 {
    kind.eval(from, to)
}

/// Maze generation failure: no solvable maze within the retry budget.
#[derive(Debug, Clone, PartialEq)]
pub struct MazeGenError {
    pub attempts: u32,
    pub width: i32,
    pub height: i32,
    pub wall_frequency: f64,
}

impl fmt::Display for MazeGenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no solvable {}×{} maze at wall frequency {} within {} attempts",
            self.width, self.height, self.wall_frequency, self.attempts
        )
    }
}

impl std::error::Error for MazeGenError {}

/// How many i.i.d. redraws the generator tries before giving up.
pub const MAZE_GEN_MAX_ATTEMPTS: u32 = 64;

/// Generate a solvable maze: start and goal land on random distinct cells,
/// then every other cell becomes a wall independently with probability
/// `wall_frequency`; unsolvable draws are rejected and redrawn from the same
/// seeded stream, so the result is a deterministic function of the seed.
pub fn generate_maze(
    width: i32,
    height: i32,
    wall_frequency: f64,
    seed: u64,
) -> Result<Grid, MazeGenError> {
    assert!(width >= 1 && height >= 1, "maze must be at least 1×1");
    assert!((0.0..1.0).contains(&wall_frequency), "wall frequency must be in [0, 1)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cell_count = (width as u64) * (height as u64);
    for _ in 0..MAZE_GEN_MAX_ATTEMPTS {
        let mut grid = Grid::open(width, height);
        grid.start = index_cell(rng.random_range(0..cell_count), width);
        grid.goal = grid.start;
        while grid.goal == grid.start && cell_count > 1 {
            grid.goal = index_cell(rng.random_range(0..cell_count), width);
        }
        for cell in grid.cells().collect::<Vec<_>>() {
            if cell != grid.start && cell != grid.goal && rng.random_bool(wall_frequency) {
                grid.set_wall(cell);
            }
        }
        if astar_cost(&grid, grid.start, grid.goal, GridHeuristic::Manhattan).is_some() {
            return Ok(grid);
        }
    }
    Err(MazeGenError {
        attempts: MAZE_GEN_MAX_ATTEMPTS,
        width,
        height,
        wall_frequency,
    })
}

fn index_cell(index: u64, width: i32) -> Cell {
    let w = width as u64;
    Cell::new((index / w) as i32, (index % w) as i32)
}

/// Deterministic A* path cost on the grid (unit step costs), or `None`
/// when the goal is unreachable. `h` must not overestimate; both bundled
/// heuristics are admissible on 4-connected grids.
pub fn astar_cost(grid: &Grid, from: Cell, to: Cell, h: GridHeuristic) -> Option<u32> {
    astar_path(grid, from, to, h).map(|p| (p.len() - 1) as u32)
}

/// Deterministic A* path (including both endpoints). Frontier ties break
/// on f-value, then canonical cell order, so the returned path is a pure
/// function of the inputs.
pub fn astar_path(grid: &Grid, from: Cell, to: Cell, h: GridHeuristic) -> Option<Vec<Cell>> {
    if !grid.is_free(from) || !grid.is_free(to) {
        return None;
    }
    // f is stored scaled through the float heuristic; ties break on the
    // true f as total_cmp, then cell order, via a BTreeSet of keys.
    #[derive(PartialEq, Clone, Copy, Debug)]
    struct F(f64);
    impl Eq for F {}
    impl PartialOrd for F {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for F {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }

    let mut open: BTreeSet<(F, Cell)> = BTreeSet::new();
    let mut g: std::collections::HashMap<Cell, u32> = std::collections::HashMap::new();
    let mut parent: std::collections::HashMap<Cell, Cell> = std::collections::HashMap::new();
    g.insert(from, 0);
    open.insert((F(h.eval(from, to)), from));

    while let Some((_, cell)) = open.pop_first() {
        if cell == to {
            let mut path = vec![cell];
            let mut cur = cell;
            while let Some(&p) = parent.get(&cur) {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        let gc = g[&cell];
        for n in grid.free_neighbors(cell) {
            let ng = gc + 1;
            if g.get(&n).is_none_or(|&old| ng < old) {
                if let Some(&old) = g.get(&n) {
                    open.remove(&(F(old as f64 + h.eval(n, to)), n));
                }
                g.insert(n, ng);
                parent.insert(n, cell);
                open.insert((F(ng as f64 + h.eval(n, to)), n));
            }
        }
    }
    None
}
