//! Frequency tables of adversarial windows: construction from corpora of
//! small instances, canonical dedup, thresholding, and a human-readable
//! persistence format with an exact round-trip guarantee.

use super::{
    extract_grid_window, extract_strips_window, normalize_window, GridWindow, StripsWindow,
    WindowAction, WindowError,
};
use crate::grid::{astar_cost, astar_path, generate_maze, Dir, GridHeuristic};
use crate::planner::{solve, SearchConfig};
use crate::strips::{apply_action, PlanCost, Predicate, State, Task};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableError {
    Syntax { line: usize, message: String },
    FlavorMismatch { expected: String, found: String },
}

impl fmt::Display for TableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableError::Syntax { line, message } => write!(f, "table line {line}: {message}"),
            TableError::FlavorMismatch { expected, found } => {
                write!(f, "table flavor is {found}, expected {expected}")
            }
        }
    }
}

impl std::error::Error for TableError {}

/// Windows that can live in a [`WindowTable`]: they canonicalize, render
/// to text, and parse back.
pub trait TableWindow: Clone + PartialEq + Send + Sync {
    const FLAVOR: &'static str;
    fn canonical(&self) -> Self;
    /// Text block for persistence. For a canonical window this doubles as
    /// the table key.
    fn render(&self) -> String;
    fn parse(lines: &[&str], first_line_no: usize) -> Result<Self, TableError>;
    fn window_size(&self) -> usize;
}

impl TableWindow for GridWindow {
    const FLAVOR: &'static str = "grid";

    fn canonical(&self) -> Self {
        GridWindow::canonical(self)
    }

    fn render(&self) -> String {
        let mut out = format!("approach {}\n", self.approach().name());
        for r in 0..self.size() {
            for c in 0..self.size() {
                out.push(if self.is_wall(r, c) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }

    fn parse(lines: &[&str], first_line_no: usize) -> Result<Self, TableError> {
        let err = |off: usize, message: &str| TableError::Syntax {
            line: first_line_no + off,
            message: message.to_string(),
        };
        let approach_line = lines.first().ok_or_else(|| err(0, "missing approach line"))?;
        let name = approach_line
            .strip_prefix("approach ")
            .ok_or_else(|| err(0, "expected `approach <dir>`"))?;
        let approach =
            Dir::from_name(name).ok_or_else(|| err(0, "unknown approach direction"))?;
        let rows = &lines[1..];
        let n = rows.len();
        if n < 3 || n % 2 == 0 {
            return Err(err(1, "mask must have an odd number of rows, at least 3"));
        }
        let mut mask = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.chars().count() != n {
                return Err(err(1 + i, "mask rows must be square with the row count"));
            }
            for ch in row.chars() {
                match ch {
                    '#' => mask.push(true),
                    '.' => mask.push(false),
                    _ => return Err(err(1 + i, "mask cells must be `#` or `.`")),
                }
            }
        }
        if mask[(n / 2) * n + n / 2] {
            return Err(err(1, "window center must be free"));
        }
        Ok(GridWindow::new(n, mask, approach))
    }

    fn window_size(&self) -> usize {
        self.size()
    }
}

impl TableWindow for StripsWindow {
    const FLAVOR: &'static str = "strips";

    fn canonical(&self) -> Self {
        StripsWindow::canonical(self)
    }

    fn render(&self) -> String {
        StripsWindow::render(self)
    }

    fn parse(lines: &[&str], first_line_no: usize) -> Result<Self, TableError> {
        let err = |off: usize, message: String| TableError::Syntax {
            line: first_line_no + off,
            message,
        };
        let mut obj_types = BTreeMap::new();
        let mut actions = Vec::new();
        let mut states = Vec::new();
        for (i, line) in lines.iter().enumerate() {
            if let Some(rest) = line.strip_prefix("objects") {
                for tok in rest.split_whitespace() {
                    let (o, t) = tok
                        .split_once(':')
                        .ok_or_else(|| err(i, format!("bad object entry {tok:?}")))?;
                    obj_types.insert(o.to_string(), t.to_string());
                }
            } else if let Some(rest) = line.strip_prefix("action ") {
                let inner = rest
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| err(i, "action must be parenthesized".to_string()))?;
                let mut toks = inner.split_whitespace();
                let schema = toks
                    .next()
                    .ok_or_else(|| err(i, "empty action".to_string()))?
                    .to_string();
                actions.push(WindowAction { schema, args: toks.map(str::to_string).collect() });
            } else if let Some(rest) = line.strip_prefix("state") {
                let mut preds = Vec::new();
                for group in split_groups(rest) {
                    let mut toks = group.split_whitespace();
                    let name = toks
                        .next()
                        .ok_or_else(|| err(i, "empty predicate".to_string()))?
                        .to_string();
                    preds.push(Predicate { name, args: toks.map(str::to_string).collect() });
                }
                states.push(State::from_predicates(preds));
            } else {
                return Err(err(i, format!("unexpected line {line:?}")));
            }
        }
        if states.len() != actions.len() + 1 || actions.is_empty() {
            return Err(err(
                0,
                format!(
                    "window needs n states and n-1 actions, found {} and {}",
                    states.len(),
                    actions.len()
                ),
            ));
        }
        Ok(StripsWindow { states, actions, obj_types })
    }

    fn window_size(&self) -> usize {
        self.states.len()
    }
}

/// Split `"(A b c) (D)"` into the strings between balanced parentheses.
fn split_groups(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0u32;
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                if depth == 1 {
                    cur.clear();
                    continue;
                }
            }
            ')' => {
                depth = depth.saturating_sub(1);
                if depth == 0 {
                    out.push(cur.clone());
                    continue;
                }
            }
            _ => {}
        }
        if depth > 0 {
            cur.push(ch);
        }
    }
    out
}

/// Provenance and accounting for a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMeta {
    pub flavor: String,
    pub window_size: usize,
    /// Instances the build was asked to process.
    pub instances: u64,
    pub threshold: u64,
    /// Free-form adversary label (heuristic, algorithm, …).
    pub adversary: String,
    pub seed: u64,
    /// Instances whose best change strictly increased cost and whose
    /// window made it into the table. Pre-threshold, Σ counts equals this.
    pub contributing: u64,
    /// Instances with an adversarial change but a trajectory too short
    /// for the window size.
    pub skipped_short: u64,
    /// Instances the builder could not solve (generator give-up or
    /// planner budget exhaustion).
    pub skipped_unsolved: u64,
}

impl TableMeta {
    pub fn new(flavor: &str, window_size: usize) -> TableMeta {
        TableMeta {
            flavor: flavor.to_string(),
            window_size,
            instances: 0,
            threshold: 0,
            adversary: String::new(),
            seed: 0,
            contributing: 0,
            skipped_short: 0,
            skipped_unsolved: 0,
        }
    }
}

/// Deduplicated, frequency-counted store of canonical windows. After
/// [`WindowTable::finalize`], entries are ordered by descending count,
/// ties by canonical text.
#[derive(Debug, Clone)]
pub struct WindowTable<W: TableWindow> {
    pub meta: TableMeta,
    entries: Vec<(W, u64)>,
    index: HashMap<String, usize>,
}

impl<W: TableWindow> WindowTable<W> {
    pub fn new(meta: TableMeta) -> WindowTable<W> {
        WindowTable { meta, entries: Vec::new(), index: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(W, u64)] {
        &self.entries
    }

    /// Σ of the occurrence counts.
    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    /// Canonicalize and merge one window, incrementing its class count.
    pub fn insert(&mut self, w: &W) {
        let canon = w.canonical();
        let key = canon.render();
        match self.index.get(&key) {
            Some(&i) => self.entries[i].1 += 1,
            None => {
                self.index.insert(key, self.entries.len());
                self.entries.push((canon, 1));
            }
        }
    }

    /// Occurrence count of the window's equivalence class, if present.
    pub fn lookup(&self, w: &W) -> Option<u64> {
        let key = w.canonical().render();
        self.index.get(&key).map(|&i| self.entries[i].1)
    }

    /// Sort entries by descending count (ties by canonical text) and
    /// rebuild the lookup index.
    pub fn finalize(&mut self) {
        let mut keyed: Vec<(String, W, u64)> = self
            .entries
            .drain(..)
            .map(|(w, c)| (w.render(), w, c))
            .collect();
        keyed.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| a.0.cmp(&b.0)));
        self.index.clear();
        for (i, (key, w, c)) in keyed.into_iter().enumerate() {
            self.index.insert(key, i);
            self.entries.push((w, c));
        }
    }

    /// Drop entries whose count is below `threshold` and record it.
    pub fn thresholded(mut self, threshold: u64) -> WindowTable<W> {
        self.entries.retain(|(_, c)| *c >= threshold);
        self.meta.threshold = threshold;
        self.finalize();
        self
    }

    /// Serialize to the versioned text format. Exact inverse of
    /// [`WindowTable::parse`], byte for byte.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("advplan-window-table v1\n");
        out.push_str(&format!("flavor {}\n", self.meta.flavor));
        out.push_str(&format!("window-size {}\n", self.meta.window_size));
        out.push_str(&format!("instances {}\n", self.meta.instances));
        out.push_str(&format!("threshold {}\n", self.meta.threshold));
        out.push_str(&format!("adversary {}\n", self.meta.adversary));
        out.push_str(&format!("seed {}\n", self.meta.seed));
        out.push_str(&format!("contributing {}\n", self.meta.contributing));
        out.push_str(&format!("skipped-short {}\n", self.meta.skipped_short));
        out.push_str(&format!("skipped-unsolved {}\n", self.meta.skipped_unsolved));
        out.push_str(&format!("entries {}\n", self.entries.len()));
        for (w, count) in &self.entries {
            out.push('\n');
            out.push_str(&format!("count {count}\n"));
            out.push_str(&w.render());
        }
        out
    }

    /// Parse the text format, verifying the flavor matches `W`.
    pub fn parse(text: &str) -> Result<WindowTable<W>, TableError> {
        let lines: Vec<&str> = text.lines().collect();
        let syntax = |line: usize, message: String| TableError::Syntax { line: line + 1, message };
        let mut meta = TableMeta::new(W::FLAVOR, 0);
        let header = [
            "advplan-window-table",
            "flavor",
            "window-size",
            "instances",
            "threshold",
            "adversary",
            "seed",
            "contributing",
            "skipped-short",
            "skipped-unsolved",
            "entries",
        ];
        if lines.len() < header.len() {
            return Err(syntax(lines.len(), "truncated header".to_string()));
        }
        let mut declared_entries = 0usize;
        for (i, key) in header.iter().enumerate() {
            let line = lines[i];
            let rest = line
                .strip_prefix(key)
                .map(|r| r.strip_prefix(' ').unwrap_or(r))
                .ok_or_else(|| syntax(i, format!("expected `{key} …`, found {line:?}")))?;
            let bad = |what: &str| syntax(i, format!("bad {what}: {rest:?}"));
            match *key {
                "advplan-window-table" => {
                    if rest != "v1" {
                        return Err(syntax(i, format!("unsupported version {rest:?}")));
                    }
                }
                "flavor" => {
                    if rest != W::FLAVOR {
                        return Err(TableError::FlavorMismatch {
                            expected: W::FLAVOR.to_string(),
                            found: rest.to_string(),
                        });
                    }
                    meta.flavor = rest.to_string();
                }
                "window-size" => meta.window_size = rest.parse().map_err(|_| bad("size"))?,
                "instances" => meta.instances = rest.parse().map_err(|_| bad("count"))?,
                "threshold" => meta.threshold = rest.parse().map_err(|_| bad("threshold"))?,
                "adversary" => meta.adversary = rest.to_string(),
                "seed" => meta.seed = rest.parse().map_err(|_| bad("seed"))?,
                "contributing" => meta.contributing = rest.parse().map_err(|_| bad("count"))?,
                "skipped-short" => meta.skipped_short = rest.parse().map_err(|_| bad("count"))?,
                "skipped-unsolved" => {
                    meta.skipped_unsolved = rest.parse().map_err(|_| bad("count"))?
                }
                "entries" => declared_entries = rest.parse().map_err(|_| bad("count"))?,
                _ => unreachable!(),
            }
        }
        let mut table = WindowTable::new(meta);
        let mut i = header.len();
        while i < lines.len() {
            if lines[i].is_empty() {
                i += 1;
                continue;
            }
            let count: u64 = lines[i]
                .strip_prefix("count ")
                .and_then(|r| r.parse().ok())
                .ok_or_else(|| syntax(i, format!("expected `count <n>`, found {:?}", lines[i])))?;
            let start = i + 1;
            let mut end = start;
            while end < lines.len() && !lines[end].is_empty() {
                end += 1;
            }
            let w = W::parse(&lines[start..end], start + 1)?;
            let key = w.render();
            if table.index.contains_key(&key) {
                return Err(syntax(start, "duplicate canonical window".to_string()));
            }
            table.index.insert(key, table.entries.len());
            table.entries.push((w, count));
            i = end;
        }
        if table.entries.len() != declared_entries {
            return Err(syntax(
                lines.len(),
                format!(
                    "header declares {declared_entries} entries, found {}",
                    table.entries.len()
                ),
            ));
        }
        Ok(table)
    }
}

fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Per-instance seed stream for table builds.
pub(crate) fn instance_seed(base: u64, index: u64) -> u64 {
    mix64(base ^ mix64(index))
}

/// Settings for building a maze window table.
#[derive(Debug, Clone)]
pub struct GridTableConfig {
    pub instances: u64,
    pub width: i32,
    pub height: i32,
    pub wall_frequency: f64,
    pub window_size: usize,
    pub threshold: u64,
    /// Heuristic assumed for the victim's path, used both to pick the
    /// baseline path and recorded in the metadata.
    pub heuristic: GridHeuristic,
    pub adversary: String,
    pub seed: u64,
}

impl GridTableConfig {
    pub fn new(instances: u64, seed: u64) -> GridTableConfig {
        GridTableConfig {
            instances,
            width: 15,
            height: 15,
            wall_frequency: 0.25,
            window_size: 3,
            threshold: 0,
            heuristic: GridHeuristic::Euclidean,
            adversary: "informed".to_string(),
            seed,
        }
    }
}

/// Build a maze window table: per instance, brute-force the single best
/// wall on the baseline path; when it strictly increases the cost (or
/// disconnects), record the 3×3 view around that cell (without the wall)
/// with the path's incoming direction, merged up to rotation.
pub fn build_grid_table(cfg: &GridTableConfig) -> WindowTable<GridWindow> {
    let per_instance: Vec<Option<Option<GridWindow>>> = (0..cfg.instances)
        .into_par_iter()
        .map(|i| {
            let seed = instance_seed(cfg.seed, i);
            let maze =
                match generate_maze(cfg.width, cfg.height, cfg.wall_frequency, seed) {
                    Ok(m) => m,
                    Err(_) => return None, // generator give-up
                };
            let path = astar_path(&maze, maze.start, maze.goal, cfg.heuristic)
                .expect("generated mazes are solvable");
            let baseline = PlanCost::Finite((path.len() - 1) as u64);
            let mut best: Option<(PlanCost, usize)> = None;
            for i in 1..path.len().saturating_sub(1) {
                let mut walled = maze.clone();
                walled.set_wall(path[i]);
                let cost = match astar_cost(&walled, walled.start, walled.goal, cfg.heuristic) {
                    Some(c) => PlanCost::Finite(c as u64),
                    None => PlanCost::Infinite,
                };
                if best.as_ref().is_none_or(|(b, _)| cost > *b) {
                    best = Some((cost, i));
                }
            }
            Some(match best {
                Some((cost, i)) if cost > baseline => {
                    let approach = Dir::between(path[i - 1], path[i])
                        .expect("consecutive path cells are adjacent");
                    Some(extract_grid_window(&maze, path[i], cfg.window_size, approach))
                }
                _ => None,
            })
        })
        .collect();

    let mut meta = TableMeta::new(GridWindow::FLAVOR, cfg.window_size);
    meta.instances = cfg.instances;
    meta.adversary = cfg.adversary.clone();
    meta.seed = cfg.seed;
    let mut table = WindowTable::new(meta);
    for outcome in per_instance {
        match outcome {
            None => table.meta.skipped_unsolved += 1,
            Some(None) => {}
            Some(Some(w)) => {
                table.insert(&w);
                table.meta.contributing += 1;
            }
        }
    }
    table.finalize();
    table.thresholded(cfg.threshold)
}

/// Settings for building a STRIPS window table.
#[derive(Debug, Clone)]
pub struct StripsTableConfig {
    pub instances: u64,
    pub window_size: usize,
    pub threshold: u64,
    /// Planner used to solve the small training instances and to re-solve
    /// them with a candidate action removed.
    pub planner: SearchConfig,
    pub adversary: String,
    pub seed: u64,
}

impl StripsTableConfig {
    pub fn new(instances: u64, seed: u64) -> StripsTableConfig {
        StripsTableConfig {
            instances,
            window_size: 4,
            threshold: 0,
            planner: SearchConfig::optimal(),
            adversary: "offline".to_string(),
            seed,
        }
    }
}

/// Build a STRIPS window table from generated tasks: per instance,
/// brute-force the single most damaging plan-action removal; when it
/// strictly increases the cost (or makes the task unsolvable), extract
/// the window ending at that action from the baseline trajectory,
/// normalize it, and merge by object-renaming equivalence.
pub fn build_strips_table<F>(cfg: &StripsTableConfig, gen: F) -> WindowTable<StripsWindow>
where
    F: Fn(u64) -> Task + Sync,
{
    #[derive(Clone)]
    enum Outcome {
        Unsolved,
        NoChange,
        TooShort,
        Window(StripsWindow),
    }

    let per_instance: Vec<Outcome> = (0..cfg.instances)
        .into_par_iter()
        .map(|i| {
            let task = gen(instance_seed(cfg.seed, i));
            let base = solve(&task, &cfg.planner);
            let Some(plan) = base.outcome.plan() else {
                return Outcome::Unsolved;
            };
            let baseline = PlanCost::Finite(plan.total_cost);

            // Replay the plan to get the state trajectory.
            let mut states = vec![task.init.clone()];
            for a in &plan.actions {
                let next = apply_action(states.last().unwrap(), a)
                    .expect("planner output must replay");
                states.push(next);
            }

            let mut best: Option<(PlanCost, usize)> = None;
            for (i, a) in plan.actions.iter().enumerate() {
                let args: Vec<&str> = a.binding.iter().map(String::as_str).collect();
                let idx = task
                    .find_action(&a.schema, &args)
                    .expect("plan actions come from the task");
                let reduced = task.without_actions(&std::iter::once(idx).collect());
                let cost = match solve(&reduced, &cfg.planner).outcome.cost() {
                    Some(c) => c,
                    None => continue, // budget exhausted: no measurement
                };
                // On ties take the later action: the window reaches
                // backwards, so a later change keeps more usable history.
                if best.as_ref().is_none_or(|(b, _)| cost >= *b) {
                    best = Some((cost, i));
                }
            }
            match best {
                Some((cost, i)) if cost > baseline => {
                    match extract_strips_window(&states, &plan.actions, i, cfg.window_size, &task)
                    {
                        Ok(w) => Outcome::Window(normalize_window(&w)),
                        Err(WindowError::TrajectoryTooShort { .. }) => Outcome::TooShort,
                        Err(e) => panic!("window extraction: {e}"),
                    }
                }
                _ => Outcome::NoChange,
            }
        })
        .collect();

    let mut meta = TableMeta::new(StripsWindow::FLAVOR, cfg.window_size);
    meta.instances = cfg.instances;
    meta.adversary = cfg.adversary.clone();
    meta.seed = cfg.seed;
    let mut table = WindowTable::new(meta);
    for outcome in per_instance {
        match outcome {
            Outcome::Unsolved => table.meta.skipped_unsolved += 1,
            Outcome::NoChange => {}
            Outcome::TooShort => table.meta.skipped_short += 1,
            Outcome::Window(w) => {
                table.insert(&w);
                table.meta.contributing += 1;
            }
        }
    }
    table.finalize();
    table.thresholded(cfg.threshold)
}
