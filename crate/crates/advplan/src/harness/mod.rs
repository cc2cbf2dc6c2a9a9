//! Benchmark harness: corpus generation, attack sweeps over a budget
//! range, per-instance records, and aggregate reporting.
//!
//! An experiment is described by an [`ExperimentConfig`] (parsed from a
//! `key = value` file, overridable from the command line), runs one
//! attack scenario over a generated corpus, and yields one
//! [`InstanceRecord`] per instance and budget plus an
//! [`AggregateReport`] with one row per budget.

mod run;

pub use run::{run_experiment, ExperimentResult, HarnessError, InstanceRecord};

use crate::attacks::MAX_BUDGET;
use crate::grid::GridHeuristic;
use crate::planner::{Algorithm, Heuristic, SearchConfig};
use crate::attacks::SenseMode;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which instance family the experiment runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Corpus {
    Maze,
    AirCargo,
    Blocks,
}

impl Corpus {
    pub fn name(self) -> &'static str {
        match self {
            Corpus::Maze => "maze",
            Corpus::AirCargo => "air-cargo",
            Corpus::Blocks => "blocks",
        }
    }

    fn parse(s: &str) -> Option<Corpus> {
        match s {
            "maze" => Some(Corpus::Maze),
            "air-cargo" => Some(Corpus::AirCargo),
            "blocks" => Some(Corpus::Blocks),
            _ => None,
        }
    }
}

/// The five attack scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    InformedOnline,
    AgentHeuristicOnline,
    BlackBoxOnline,
    AgentHeuristicOffline,
    BlackBoxOffline,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::InformedOnline => "informed-online",
            Scenario::AgentHeuristicOnline => "agent-heuristic-online",
            Scenario::BlackBoxOnline => "black-box-online",
            Scenario::AgentHeuristicOffline => "agent-heuristic-offline",
            Scenario::BlackBoxOffline => "black-box-offline",
        }
    }

    fn parse(s: &str) -> Option<Scenario> {
        match s {
            "informed-online" => Some(Scenario::InformedOnline),
            "agent-heuristic-online" => Some(Scenario::AgentHeuristicOnline),
            "black-box-online" => Some(Scenario::BlackBoxOnline),
            "agent-heuristic-offline" => Some(Scenario::AgentHeuristicOffline),
            "black-box-offline" => Some(Scenario::BlackBoxOffline),
            _ => None,
        }
    }

    pub fn is_online(self) -> bool {
        matches!(
            self,
            Scenario::InformedOnline | Scenario::AgentHeuristicOnline | Scenario::BlackBoxOnline
        )
    }
}

/// The offline adversary's own search procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdversarySearch {
    AStarAdditive,
    Bfs,
    AStarGoalCount,
}

impl AdversarySearch {
    pub fn name(self) -> &'static str {
        match self {
            AdversarySearch::AStarAdditive => "astar-additive",
            AdversarySearch::Bfs => "bfs",
            AdversarySearch::AStarGoalCount => "astar-goal-count",
        }
    }

    fn parse(s: &str) -> Option<AdversarySearch> {
        match s {
            "astar-additive" => Some(AdversarySearch::AStarAdditive),
            "bfs" => Some(AdversarySearch::Bfs),
            "astar-goal-count" => Some(AdversarySearch::AStarGoalCount),
            _ => None,
        }
    }

    pub fn to_config(self) -> SearchConfig {
        match self {
            AdversarySearch::AStarAdditive => SearchConfig {
                algorithm: Algorithm::AStar,
                heuristic: Heuristic::Additive,
                ..SearchConfig::optimal()
            },
            AdversarySearch::Bfs => {
                SearchConfig { algorithm: Algorithm::Bfs, ..SearchConfig::optimal() }
            }
            AdversarySearch::AStarGoalCount => SearchConfig {
                algorithm: Algorithm::AStar,
                heuristic: Heuristic::GoalCount,
                ..SearchConfig::optimal()
            },
        }
    }
}

/// The victim's planner on task corpora.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AgentSearch {
    Optimal,
    GreedyAdditive,
    GreedyGoalCount,
}

impl AgentSearch {
    pub fn name(self) -> &'static str {
        match self {
            AgentSearch::Optimal => "optimal",
            AgentSearch::GreedyAdditive => "greedy-additive",
            AgentSearch::GreedyGoalCount => "greedy-goal-count",
        }
    }

    fn parse(s: &str) -> Option<AgentSearch> {
        match s {
            "optimal" => Some(AgentSearch::Optimal),
            "greedy-additive" => Some(AgentSearch::GreedyAdditive),
            "greedy-goal-count" => Some(AgentSearch::GreedyGoalCount),
            _ => None,
        }
    }

    pub fn to_config(self) -> SearchConfig {
        match self {
            AgentSearch::Optimal => SearchConfig::optimal(),
            AgentSearch::GreedyAdditive => SearchConfig::greedy_additive(),
            AgentSearch::GreedyGoalCount => SearchConfig {
                algorithm: Algorithm::GreedyBestFirst,
                heuristic: Heuristic::GoalCount,
                ..SearchConfig::optimal()
            },
        }
    }
}

/// Full description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub corpus: Corpus,
    pub scenario: Scenario,
    /// Evaluation instances.
    pub instances: u32,
    /// Base seed; instance and training seeds derive from it.
    pub seed: u64,
    /// Budgets to sweep, e.g. `0,1,2`.
    pub budgets: Vec<u32>,

    // Maze corpus.
    pub width: usize,
    pub height: usize,
    pub wall_frequency: f64,

    // Task corpora.
    pub planes: usize,
    pub cargos: usize,
    pub airports: usize,
    pub blocks: usize,

    // Pattern table.
    /// Training instances the table is built from.
    pub table_instances: u32,
    /// 0 = pick per flavor (3 on grids, 4 on tasks).
    pub window_size: usize,
    /// Occurrence-count cutoff; `None` = scenario default (10 for the
    /// black-box scenarios, 0 otherwise).
    pub threshold: Option<u64>,

    // Agents and adversaries.
    pub grid_heuristic: GridHeuristic,
    pub strips_agent: AgentSearch,
    pub adversary_search: AdversarySearch,
    pub sense: SenseMode,
    pub restart_on_match: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            corpus: Corpus::Maze,
            scenario: Scenario::InformedOnline,
            instances: 200,
            seed: 7,
            budgets: vec![1, 2],
            width: 15,
            height: 15,
            wall_frequency: 0.25,
            planes: 2,
            cargos: 3,
            airports: 3,
            blocks: 5,
            table_instances: 500,
            window_size: 0,
            threshold: None,
            grid_heuristic: GridHeuristic::Euclidean,
            strips_agent: AgentSearch::Optimal,
            adversary_search: AdversarySearch::AStarAdditive,
            sense: SenseMode::Full,
            restart_on_match: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    Syntax { line: usize, message: String },
    UnknownKey(String),
    BadValue { key: String, value: String },
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Syntax { line, message } => write!(f, "line {line}: {message}"),
            ConfigError::UnknownKey(k) => write!(f, "unknown key {k:?}"),
            ConfigError::BadValue { key, value } => {
                write!(f, "bad value {value:?} for key {key:?}")
            }
            ConfigError::Invalid(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    /// Parse a `key = value` config file; `#` comments and blank lines
    /// are skipped. Unset keys keep their defaults.
    pub fn from_text(text: &str) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    message: "expected `key = value`".to_string(),
                });
            };
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Apply `key=value` overrides (e.g. from the command line) on top
    /// of this config, then re-validate.
    pub fn with_overrides(mut self, overrides: &[String]) -> Result<ExperimentConfig, ConfigError> {
        for o in overrides {
            let Some((key, value)) = o.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: 0,
                    message: format!("override {o:?} is not `key=value`"),
                });
            };
            self.set(key.trim(), value.trim())?;
        }
        self.validate()?;
        Ok(self)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue { key: key.to_string(), value: value.to_string() };
        match key {
            "corpus" => self.corpus = Corpus::parse(value).ok_or_else(bad)?,
            "scenario" => self.scenario = Scenario::parse(value).ok_or_else(bad)?,
            "instances" => self.instances = value.parse().map_err(|_| bad())?,
            "seed" => self.seed = value.parse().map_err(|_| bad())?,
            "budgets" => {
                let parsed: Result<Vec<u32>, _> =
                    value.split(',').map(|p| p.trim().parse()).collect();
                self.budgets = parsed.map_err(|_| bad())?;
            }
            "width" => self.width = value.parse().map_err(|_| bad())?,
            "height" => self.height = value.parse().map_err(|_| bad())?,
            "wall-frequency" => self.wall_frequency = value.parse().map_err(|_| bad())?,
            "planes" => self.planes = value.parse().map_err(|_| bad())?,
            "cargos" => self.cargos = value.parse().map_err(|_| bad())?,
            "airports" => self.airports = value.parse().map_err(|_| bad())?,
            "blocks" => self.blocks = value.parse().map_err(|_| bad())?,
            "table-instances" => self.table_instances = value.parse().map_err(|_| bad())?,
            "window-size" => self.window_size = value.parse().map_err(|_| bad())?,
            "threshold" => self.threshold = Some(value.parse().map_err(|_| bad())?),
            "grid-heuristic" => {
                self.grid_heuristic = match value {
                    "euclidean" => GridHeuristic::Euclidean,
                    "manhattan" => GridHeuristic::Manhattan,
                    _ => return Err(bad()),
                }
            }
            "strips-agent" => self.strips_agent = AgentSearch::parse(value).ok_or_else(bad)?,
            "adversary-search" => {
                self.adversary_search = AdversarySearch::parse(value).ok_or_else(bad)?
            }
            "sense" => {
                self.sense = match value {
                    "full" => SenseMode::Full,
                    "adjacent" => SenseMode::Adjacent,
                    _ => return Err(bad()),
                }
            }
            "restart-on-match" => {
                self.restart_on_match = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(bad()),
                }
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.instances == 0 {
            return Err(ConfigError::Invalid("instances must be positive".into()));
        }
        if self.budgets.is_empty() {
            return Err(ConfigError::Invalid("budgets must list at least one value".into()));
        }
        if let Some(&k) = self.budgets.iter().find(|&&k| k > MAX_BUDGET) {
            return Err(ConfigError::Invalid(format!(
                "budget {k} exceeds the maximum of {MAX_BUDGET}"
            )));
        }
        if self.scenario.is_online() && self.corpus != Corpus::Maze {
            return Err(ConfigError::Invalid(format!(
                "scenario {} needs the maze corpus",
                self.scenario.name()
            )));
        }
        if !self.scenario.is_online() && self.corpus == Corpus::Maze {
            return Err(ConfigError::Invalid(format!(
                "scenario {} needs a task corpus (air-cargo or blocks)",
                self.scenario.name()
            )));
        }
        if self.corpus == Corpus::Maze {
            if self.width < 2 || self.height < 2 {
                return Err(ConfigError::Invalid("mazes must be at least 2×2".into()));
            }
            if !(0.0..1.0).contains(&self.wall_frequency) {
                return Err(ConfigError::Invalid(
                    "wall-frequency must lie in [0, 1)".into(),
                ));
            }
            let n = self.effective_window_size();
            if n < 3 || n % 2 == 0 {
                return Err(ConfigError::Invalid(
                    "window-size must be odd and at least 3 on grids".into(),
                ));
            }
            if n > self.width.min(self.height) {
                return Err(ConfigError::Invalid(
                    "window-size must not exceed the maze dimensions".into(),
                ));
            }
        } else if self.effective_window_size() < 2 {
            return Err(ConfigError::Invalid(
                "window-size must be at least 2 on tasks".into(),
            ));
        }
        Ok(())
    }

    /// The window size actually probed: the configured one, or the
    /// flavor default.
    pub fn effective_window_size(&self) -> usize {
        if self.window_size != 0 {
            return self.window_size;
        }
        if self.corpus == Corpus::Maze {
            3
        } else {
            4
        }
    }

    /// The table cutoff actually applied: the configured one, or the
    /// scenario default (black-box adversaries prune rare patterns).
    pub fn effective_threshold(&self) -> u64 {
        self.threshold.unwrap_or(match self.scenario {
            Scenario::BlackBoxOnline | Scenario::BlackBoxOffline => 10,
            _ => 0,
        })
    }

    /// Render as a config file; parsing it back yields an equal config.
    pub fn to_text(&self) -> String {
        let budgets =
            self.budgets.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        out.push_str(&format!("corpus = {}\n", self.corpus.name()));
        out.push_str(&format!("scenario = {}\n", self.scenario.name()));
        out.push_str(&format!("instances = {}\n", self.instances));
        out.push_str(&format!("seed = {}\n", self.seed));
        out.push_str(&format!("budgets = {budgets}\n"));
        out.push_str(&format!("width = {}\n", self.width));
        out.push_str(&format!("height = {}\n", self.height));
        out.push_str(&format!("wall-frequency = {}\n", self.wall_frequency));
        out.push_str(&format!("planes = {}\n", self.planes));
        out.push_str(&format!("cargos = {}\n", self.cargos));
        out.push_str(&format!("airports = {}\n", self.airports));
        out.push_str(&format!("blocks = {}\n", self.blocks));
        out.push_str(&format!("table-instances = {}\n", self.table_instances));
        out.push_str(&format!("window-size = {}\n", self.window_size));
        if let Some(t) = self.threshold {
            out.push_str(&format!("threshold = {t}\n"));
        }
        out.push_str(&format!(
            "grid-heuristic = {}\n",
            match self.grid_heuristic {
                GridHeuristic::Euclidean => "euclidean",
                GridHeuristic::Manhattan => "manhattan",
            }
        ));
        out.push_str(&format!("strips-agent = {}\n", self.strips_agent.name()));
        out.push_str(&format!("adversary-search = {}\n", self.adversary_search.name()));
        out.push_str(&format!(
            "sense = {}\n",
            match self.sense {
                SenseMode::Full => "full",
                SenseMode::Adjacent => "adjacent",
            }
        ));
        out.push_str(&format!("restart-on-match = {}\n", self.restart_on_match));
        out
    }
}

/// One aggregate line: a scenario at one budget over the whole corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub scenario: String,
    pub budget: u32,
    pub instances: u32,
    /// attacked > baseline.
    pub successes: u32,
    /// Attack ran but did not raise the cost.
    pub failures: u32,
    /// Instance could not be generated or attacked.
    pub errors: u32,
    /// attacked = unsolvable (a subset of successes).
    pub unsolvable_after: u32,
    /// attacked < baseline (suboptimal agents only).
    pub cost_decreases: u32,
    /// successes / instances.
    pub success_rate: f64,
    /// Mean of (attacked − baseline) over finite successes; 0 when
    /// there are none.
    pub mean_increase: f64,
}

/// All aggregate rows of one experiment, one per budget.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AggregateReport {
    pub rows: Vec<AggregateRow>,
}

const CSV_HEADER: &str = "scenario,budget,instances,successes,failures,errors,\
unsolvable_after,cost_decreases,success_rate,mean_increase";

impl AggregateReport {
    /// Render as CSV. `from_csv` on the output yields an equal report;
    /// floats are printed in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.scenario,
                r.budget,
                r.instances,
                r.successes,
                r.failures,
                r.errors,
                r.unsolvable_after,
                r.cost_decreases,
                r.success_rate,
                r.mean_increase
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<AggregateReport, ConfigError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == CSV_HEADER => {}
            _ => {
                return Err(ConfigError::Syntax {
                    line: 1,
                    message: "missing or wrong CSV header".to_string(),
                })
            }
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 10 {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    message: format!("expected 10 fields, got {}", f.len()),
                });
            }
            let err = |message: &str| ConfigError::Syntax {
                line: i + 1,
                message: message.to_string(),
            };
            rows.push(AggregateRow {
                scenario: f[0].to_string(),
                budget: f[1].parse().map_err(|_| err("bad budget"))?,
                instances: f[2].parse().map_err(|_| err("bad instances"))?,
                successes: f[3].parse().map_err(|_| err("bad successes"))?,
                failures: f[4].parse().map_err(|_| err("bad failures"))?,
                errors: f[5].parse().map_err(|_| err("bad errors"))?,
                unsolvable_after: f[6].parse().map_err(|_| err("bad unsolvable_after"))?,
                cost_decreases: f[7].parse().map_err(|_| err("bad cost_decreases"))?,
                success_rate: f[8].parse().map_err(|_| err("bad success_rate"))?,
                mean_increase: f[9].parse().map_err(|_| err("bad mean_increase"))?,
            });
        }
        Ok(AggregateReport { rows })
    }

    /// Plot-ready series: `(budget, success_rate)` lines.
    pub fn success_series_csv(&self) -> String {
        let mut out = String::from("budget,success_rate\n");
        for r in &self.rows {
            out.push_str(&format!("{},{}\n", r.budget, r.success_rate));
        }
        out
    }

    /// Plot-ready series: `(budget, mean_increase)` lines.
    pub fn increase_series_csv(&self) -> String {
        let mut out = String::from("budget,mean_increase\n");
        for r in &self.rows {
            out.push_str(&format!("{},{}\n", r.budget, r.mean_increase));
        }
        out
    }
}

#[cfg(test)]
mod tests;
