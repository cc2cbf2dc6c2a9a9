//! Experiment execution: build the pattern table, sweep the corpus and
//! budget range, and aggregate.

use super::{AggregateReport, AggregateRow, ConfigError, Corpus, ExperimentConfig, Scenario};
use crate::attacks::{offline_attack, online_attack, AttackReport, ThreatModel};
use crate::domains::{air_cargo_task, blocks_task};
use crate::grid::generate_maze;
use crate::planner::SearchConfig;
use crate::strips::{PlanCost, Task};
use crate::windows::{
    build_grid_table, build_strips_table, instance_seed, GridTableConfig, StripsTableConfig,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Keeps evaluation seeds out of the training-seed stream.
const EVAL_STREAM: u64 = 0x9d39_247e_3377_6d41;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HarnessError {
    Config(ConfigError),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Config(e) => write!(f, "config: {e}"),
        }
    }
}

impl std::error::Error for HarnessError {}

/// One instance × budget outcome. Failed instances carry an `error`
/// and count toward the error column, never toward success.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub scenario: String,
    pub instance: u32,
    pub seed: u64,
    pub budget: u32,
    pub baseline: Option<PlanCost>,
    pub attacked: Option<PlanCost>,
    pub success: bool,
    pub cost_decreased: bool,
    pub changes: Vec<String>,
    pub illegal_skipped: u64,
    pub error: Option<String>,
}

impl InstanceRecord {
    fn from_attack(
        cfg: &ExperimentConfig,
        instance: u32,
        seed: u64,
        budget: u32,
        report: &AttackReport,
    ) -> InstanceRecord {
        InstanceRecord {
            scenario: cfg.scenario.name().to_string(),
            instance,
            seed,
            budget,
            baseline: Some(report.baseline_cost),
            attacked: Some(report.attacked_cost),
            success: report.success,
            cost_decreased: report.cost_decreased,
            changes: report.removed.iter().map(|c| c.to_string()).collect(),
            illegal_skipped: report.illegal_skipped,
            error: None,
        }
    }

    fn from_error(
        cfg: &ExperimentConfig,
        instance: u32,
        seed: u64,
        budget: u32,
        error: String,
    ) -> InstanceRecord {
        InstanceRecord {
            scenario: cfg.scenario.name().to_string(),
            instance,
            seed,
            budget,
            baseline: None,
            attacked: None,
            success: false,
            cost_decreased: false,
            changes: Vec::new(),
            illegal_skipped: 0,
            error: Some(error),
        }
    }
}

/// Records, aggregates, and table statistics from one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub records: Vec<InstanceRecord>,
    pub report: AggregateReport,
    pub table_entries: usize,
    pub table_contributing: u64,
}

impl ExperimentResult {
    /// One JSON object per record, newline-separated.
    pub fn records_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}

/// Run one experiment: train the pattern table on its own seed stream,
/// then attack `instances` fresh instances at every budget in the sweep.
/// Per-instance failures become error records; the only hard error is a
/// bad config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    cfg.validate().map_err(HarnessError::Config)?;
    let (records, table_entries, table_contributing) = if cfg.scenario.is_online() {
        run_on_mazes(cfg)
    } else {
        run_on_tasks(cfg)
    };
    let report = aggregate(cfg, &records);
    Ok(ExperimentResult {
        config: cfg.clone(),
        records,
        report,
        table_entries,
        table_contributing,
    })
}

fn threat_for(cfg: &ExperimentConfig, budget: u32) -> ThreatModel {
    match cfg.scenario {
        Scenario::InformedOnline => ThreatModel::informed_online(budget),
        Scenario::AgentHeuristicOnline => {
            ThreatModel::agent_heuristic_online(budget, cfg.grid_heuristic)
        }
        Scenario::BlackBoxOnline => ThreatModel::black_box_online(budget),
        Scenario::AgentHeuristicOffline => ThreatModel::agent_heuristic_offline(
            budget,
            cfg.adversary_search.to_config().heuristic,
        ),
        Scenario::BlackBoxOffline => ThreatModel::black_box_offline(budget),
    }
}

fn run_on_mazes(cfg: &ExperimentConfig) -> (Vec<InstanceRecord>, usize, u64) {
    let adversary_view = match cfg.scenario {
        Scenario::BlackBoxOnline => crate::grid::GridHeuristic::Manhattan,
        _ => cfg.grid_heuristic,
    };
    let table_cfg = GridTableConfig {
        instances: cfg.table_instances as u64,
        width: cfg.width as i32,
        height: cfg.height as i32,
        wall_frequency: cfg.wall_frequency,
        window_size: cfg.effective_window_size(),
        threshold: cfg.effective_threshold(),
        heuristic: adversary_view,
        adversary: cfg.scenario.name().to_string(),
        seed: cfg.seed,
    };
    let table = build_grid_table(&table_cfg);

    let records: Vec<InstanceRecord> = (0..cfg.instances)
        .into_par_iter()
        .map(|i| {
            let seed = instance_seed(cfg.seed ^ EVAL_STREAM, i as u64);
            let mut rows = Vec::with_capacity(cfg.budgets.len());
            match generate_maze(cfg.width as i32, cfg.height as i32, cfg.wall_frequency, seed)
            {
                Err(e) => {
                    for &k in &cfg.budgets {
                        rows.push(InstanceRecord::from_error(cfg, i, seed, k, e.to_string()));
                    }
                }
                Ok(maze) => {
                    for &k in &cfg.budgets {
                        let threat = threat_for(cfg, k);
                        match online_attack(
                            &maze,
                            cfg.grid_heuristic,
                            &table,
                            &threat,
                            cfg.sense,
                        ) {
                            Ok((report, _)) => rows.push(InstanceRecord::from_attack(
                                cfg, i, seed, k, &report,
                            )),
                            Err(e) => rows.push(InstanceRecord::from_error(
                                cfg,
                                i,
                                seed,
                                k,
                                e.to_string(),
                            )),
                        }
                    }
                }
            }
            rows
        })
        .flatten()
        .collect();
    (records, table.len(), table.meta.contributing)
}

fn task_generator(cfg: &ExperimentConfig) -> impl Fn(u64) -> Task + Sync + '_ {
    let corpus = cfg.corpus;
    let (planes, cargos, airports, blocks) = (cfg.planes, cfg.cargos, cfg.airports, cfg.blocks);
    move |seed| match corpus {
        Corpus::AirCargo => air_cargo_task(planes, cargos, airports, seed),
        Corpus::Blocks => blocks_task(blocks, seed),
        Corpus::Maze => unreachable!("maze corpus never reaches the task runner"),
    }
}

fn run_on_tasks(cfg: &ExperimentConfig) -> (Vec<InstanceRecord>, usize, u64) {
    let table_cfg = StripsTableConfig {
        instances: cfg.table_instances as u64,
        window_size: cfg.effective_window_size(),
        threshold: cfg.effective_threshold(),
        planner: SearchConfig::optimal(),
        adversary: cfg.scenario.name().to_string(),
        seed: cfg.seed,
    };
    let generate = task_generator(cfg);
    let table = build_strips_table(&table_cfg, &generate);

    let adversary = cfg.adversary_search.to_config();
    let agent = cfg.strips_agent.to_config();
    let records: Vec<InstanceRecord> = (0..cfg.instances)
        .into_par_iter()
        .map(|i| {
            let seed = instance_seed(cfg.seed ^ EVAL_STREAM, i as u64);
            let task = generate(seed);
            let mut rows = Vec::with_capacity(cfg.budgets.len());
            for &k in &cfg.budgets {
                let threat = threat_for(cfg, k);
                match offline_attack(
                    &task,
                    &table,
                    &threat,
                    &adversary,
                    &agent,
                    cfg.restart_on_match,
                ) {
                    Ok(report) => {
                        rows.push(InstanceRecord::from_attack(cfg, i, seed, k, &report))
                    }
                    Err(e) => {
                        rows.push(InstanceRecord::from_error(cfg, i, seed, k, e.to_string()))
                    }
                }
            }
            rows
        })
        .flatten()
        .collect();
    (records, table.len(), table.meta.contributing)
}

/// Fold records into one row per budget. For every row,
/// `successes + failures + errors = instances`.
fn aggregate(cfg: &ExperimentConfig, records: &[InstanceRecord]) -> AggregateReport {
    let mut rows = Vec::with_capacity(cfg.budgets.len());
    for &k in &cfg.budgets {
        let mut successes = 0u32;
        let mut failures = 0u32;
        let mut errors = 0u32;
        let mut unsolvable_after = 0u32;
        let mut cost_decreases = 0u32;
        let mut increase_sum = 0u64;
        let mut increase_n = 0u32;
        for r in records.iter().filter(|r| r.budget == k) {
            if r.error.is_some() {
                errors += 1;
                continue;
            }
            if r.success {
                successes += 1;
            } else {
                failures += 1;
            }
            if r.cost_decreased {
                cost_decreases += 1;
            }
            match (r.baseline, r.attacked) {
                (Some(PlanCost::Finite(b)), Some(PlanCost::Finite(a))) if a > b => {
                    increase_sum += a - b;
                    increase_n += 1;
                }
                (_, Some(PlanCost::Infinite)) => unsolvable_after += 1,
                _ => {}
            }
        }
        debug_assert_eq!(successes + failures + errors, cfg.instances);
        rows.push(AggregateRow {
            scenario: cfg.scenario.name().to_string(),
            budget: k,
            instances: cfg.instances,
            successes,
            failures,
            errors,
            unsolvable_after,
            cost_decreases,
            success_rate: f64::from(successes) / f64::from(cfg.instances),
            mean_increase: if increase_n == 0 {
                0.0
            } else {
                increase_sum as f64 / f64::from(increase_n)
            },
        });
    }
    AggregateReport { rows }
}
