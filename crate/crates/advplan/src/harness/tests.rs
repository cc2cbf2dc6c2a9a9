use super::*;
use crate::strips::PlanCost;

fn maze_experiment() -> ExperimentConfig {
    ExperimentConfig {
        instances: 10,
        seed: 3,
        budgets: vec![0, 1],
        width: 9,
        height: 9,
        table_instances: 60,
        ..ExperimentConfig::default()
    }
}

fn blocks_experiment() -> ExperimentConfig {
    ExperimentConfig {
        corpus: Corpus::Blocks,
        scenario: Scenario::AgentHeuristicOffline,
        instances: 8,
        seed: 11,
        budgets: vec![1],
        blocks: 4,
        table_instances: 40,
        window_size: 3,
        ..ExperimentConfig::default()
    }
}

#[test]
fn config_text_round_trips() {
    let cfg = ExperimentConfig::default();
    assert_eq!(ExperimentConfig::from_text(&cfg.to_text()).unwrap(), cfg);

    let custom = ExperimentConfig {
        threshold: Some(10),
        budgets: vec![0, 1, 2, 3],
        wall_frequency: 0.3,
        sense: crate::attacks::SenseMode::Adjacent,
        restart_on_match: true,
        grid_heuristic: crate::grid::GridHeuristic::Manhattan,
        ..ExperimentConfig::default()
    };
    assert_eq!(ExperimentConfig::from_text(&custom.to_text()).unwrap(), custom);
}

#[test]
fn config_parsing_skips_comments_and_blank_lines() {
    let text = "# an experiment\n\nseed = 42\n  instances = 25  \n";
    let cfg = ExperimentConfig::from_text(text).unwrap();
    assert_eq!(cfg.seed, 42);
    assert_eq!(cfg.instances, 25);
    assert_eq!(cfg.corpus, Corpus::Maze, "unset keys keep defaults");
}

#[test]
fn config_parsing_reports_precise_errors() {
    assert_eq!(
        ExperimentConfig::from_text("seed 42\n").unwrap_err(),
        ConfigError::Syntax { line: 1, message: "expected `key = value`".to_string() }
    );
    assert_eq!(
        ExperimentConfig::from_text("speed = 42\n").unwrap_err(),
        ConfigError::UnknownKey("speed".to_string())
    );
    assert_eq!(
        ExperimentConfig::from_text("corpus = labyrinth\n").unwrap_err(),
        ConfigError::BadValue { key: "corpus".to_string(), value: "labyrinth".to_string() }
    );
    assert_eq!(
        ExperimentConfig::from_text("budgets = 1,x\n").unwrap_err(),
        ConfigError::BadValue { key: "budgets".to_string(), value: "1,x".to_string() }
    );
    assert!(matches!(
        ExperimentConfig::from_text("scenario = black-box-offline\n").unwrap_err(),
        ConfigError::Invalid(_)
    ));
}

#[test]
fn validation_ties_scenarios_to_their_corpora() {
    let offline_on_maze = ExperimentConfig {
        scenario: Scenario::BlackBoxOffline,
        ..ExperimentConfig::default()
    };
    assert!(matches!(offline_on_maze.validate(), Err(ConfigError::Invalid(_))));

    let online_on_blocks = ExperimentConfig {
        corpus: Corpus::Blocks,
        scenario: Scenario::InformedOnline,
        ..ExperimentConfig::default()
    };
    assert!(matches!(online_on_blocks.validate(), Err(ConfigError::Invalid(_))));

    let fine = blocks_experiment();
    assert!(fine.validate().is_ok());
}

#[test]
fn validation_bounds_the_numbers() {
    let mut cfg = ExperimentConfig::default();
    cfg.budgets = vec![1, crate::attacks::MAX_BUDGET + 1];
    assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))));

    cfg = ExperimentConfig { budgets: vec![], ..ExperimentConfig::default() };
    assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))));

    cfg = ExperimentConfig { instances: 0, ..ExperimentConfig::default() };
    assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))));

    cfg = ExperimentConfig { wall_frequency: 1.0, ..ExperimentConfig::default() };
    assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))));

    cfg = ExperimentConfig { window_size: 4, ..ExperimentConfig::default() };
    assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))), "grid windows are odd");

    cfg = ExperimentConfig { window_size: 17, ..ExperimentConfig::default() };
    assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))), "window beyond the maze");

    cfg = ExperimentConfig { window_size: 1, ..blocks_experiment() };
    assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))), "task windows need n ≥ 2");
}

#[test]
fn overrides_apply_on_top_and_revalidate() {
    let cfg = ExperimentConfig::default()
        .with_overrides(&["instances=50".to_string(), "budgets=1".to_string()])
        .unwrap();
    assert_eq!(cfg.instances, 50);
    assert_eq!(cfg.budgets, vec![1]);
    assert_eq!(cfg.seed, 7, "untouched keys keep defaults");

    assert!(ExperimentConfig::default()
        .with_overrides(&["instances".to_string()])
        .is_err());
    assert!(matches!(
        ExperimentConfig::default().with_overrides(&["corpus=blocks".to_string()]),
        Err(ConfigError::Invalid(_))
    ));
}

#[test]
fn effective_settings_fill_in_flavor_defaults() {
    let maze = ExperimentConfig::default();
    assert_eq!(maze.effective_window_size(), 3);
    assert_eq!(maze.effective_threshold(), 0);

    let black_box = ExperimentConfig {
        scenario: Scenario::BlackBoxOnline,
        ..ExperimentConfig::default()
    };
    assert_eq!(black_box.effective_threshold(), 10);

    let tasks = blocks_experiment();
    assert_eq!(
        ExperimentConfig { window_size: 0, ..tasks.clone() }.effective_window_size(),
        4
    );
    assert_eq!(tasks.effective_window_size(), 3, "explicit size wins");

    let pinned = ExperimentConfig { threshold: Some(2), ..black_box };
    assert_eq!(pinned.effective_threshold(), 2);
}

#[test]
fn maze_experiments_produce_ordered_complete_records() {
    let cfg = maze_experiment();
    let result = run_experiment(&cfg).unwrap();

    assert_eq!(result.records.len(), 20, "10 instances × 2 budgets");
    for (j, pair) in result.records.chunks(2).enumerate() {
        assert_eq!(pair[0].instance, j as u32);
        assert_eq!(pair[0].budget, 0);
        assert_eq!(pair[1].instance, j as u32);
        assert_eq!(pair[1].budget, 1);
        assert_eq!(pair[0].seed, pair[1].seed);
    }

    for r in &result.records {
        assert!(r.error.is_none(), "9×9 mazes generate reliably: {:?}", r.error);
        assert!(matches!(r.baseline, Some(PlanCost::Finite(_))));
        if r.budget == 0 {
            assert!(!r.success && r.changes.is_empty());
            assert_eq!(r.attacked, r.baseline);
        } else {
            assert!(r.changes.len() <= 1);
        }
        assert_eq!(r.scenario, "informed-online");
    }

    assert!(result.table_entries > 0);
    assert!(result.table_contributing >= result.table_entries as u64);

    assert_eq!(result.report.rows.len(), 2);
    let zero = &result.report.rows[0];
    assert_eq!((zero.budget, zero.successes, zero.errors), (0, 0, 0));
    assert_eq!(zero.failures, 10);
    assert_eq!(zero.success_rate, 0.0);
    assert_eq!(zero.mean_increase, 0.0);
    for row in &result.report.rows {
        assert_eq!(row.successes + row.failures + row.errors, row.instances);
        assert_eq!(row.instances, 10);
        assert!(row.cost_decreases == 0, "replanning walks never beat the optimum");
    }
}

#[test]
fn experiments_are_deterministic() {
    let cfg = maze_experiment();
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.report, b.report);
    assert_eq!(a.table_entries, b.table_entries);
}

#[test]
fn blocks_experiments_respect_the_optimal_agent() {
    let result = run_experiment(&blocks_experiment()).unwrap();
    assert_eq!(result.records.len(), 8);
    for r in &result.records {
        assert!(r.error.is_none(), "unexpected error: {:?}", r.error);
        let (Some(base), Some(attacked)) = (r.baseline, r.attacked) else {
            panic!("clean records carry both costs");
        };
        assert!(attacked >= base, "removals cannot help an optimal agent");
        assert_eq!(r.success, attacked > base);
        assert!(!r.cost_decreased);
    }
    let row = &result.report.rows[0];
    assert_eq!(row.successes + row.failures + row.errors, 8);
    assert_eq!(row.scenario, "agent-heuristic-offline");
}

#[test]
fn experiment_rejects_bad_configs() {
    let bad = ExperimentConfig { instances: 0, ..ExperimentConfig::default() };
    assert!(matches!(run_experiment(&bad), Err(HarnessError::Config(_))));
}

#[test]
fn records_serialize_to_parseable_jsonl() {
    let result = run_experiment(&maze_experiment()).unwrap();
    let jsonl = result.records_jsonl();
    let parsed: Vec<InstanceRecord> = jsonl
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is one record"))
        .collect();
    assert_eq!(parsed, result.records);
}

#[test]
fn aggregate_csv_round_trips() {
    let result = run_experiment(&maze_experiment()).unwrap();
    let csv = result.report.to_csv();
    assert!(csv.starts_with("scenario,budget,"));
    let parsed = AggregateReport::from_csv(&csv).unwrap();
    assert_eq!(parsed, result.report);

    let series = result.report.success_series_csv();
    let mut lines = series.lines();
    assert_eq!(lines.next(), Some("budget,success_rate"));
    assert_eq!(lines.count(), result.report.rows.len());
    assert!(result.report.increase_series_csv().starts_with("budget,mean_increase\n"));
}

#[test]
fn aggregate_csv_rejects_corrupted_input() {
    assert!(matches!(
        AggregateReport::from_csv("a,b,c\n"),
        Err(ConfigError::Syntax { line: 1, .. })
    ));

    let good = AggregateReport {
        rows: vec![AggregateRow {
            scenario: "informed-online".to_string(),
            budget: 1,
            instances: 10,
            successes: 5,
            failures: 5,
            errors: 0,
            unsolvable_after: 1,
            cost_decreases: 0,
            success_rate: 0.5,
            mean_increase: 2.5,
        }],
    };
    let csv = good.to_csv();
    assert_eq!(AggregateReport::from_csv(&csv).unwrap(), good);

    let truncated = csv.replace(",2.5", "");
    assert!(matches!(
        AggregateReport::from_csv(&truncated),
        Err(ConfigError::Syntax { line: 2, .. })
    ));
    let corrupt = csv.replace("0.5", "half");
    assert!(AggregateReport::from_csv(&corrupt).is_err());
}
