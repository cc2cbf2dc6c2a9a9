mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use advplan::attacks::{
    brute_force_attack_grid, brute_force_attack_task, offline_attack, online_attack, AttackError,
    AttackReport, BruteForceError, SenseMode, ThreatModel, DEFAULT_RESOLVE_BOUND,
};
use advplan::domains::{air_cargo_task, blocks_task};
use advplan::grid::{astar_path, generate_maze, GridHeuristic};
use advplan::harness::{
    run_experiment, AdversarySearch, AgentSearch, ConfigError, ExperimentConfig, HarnessError,
};
use advplan::reduction::{
    decide_action_interdiction, decide_arc_interdiction, max_arc_interdiction, ArcGraph,
    INTERDICTION_BOUND,
};
use advplan::strips::{domain_to_pddl, parse_task, problem_to_pddl, validate_plan};
use advplan::windows::{
    build_grid_table, build_strips_table, GridTableConfig, GridWindow, StripsTableConfig,
    StripsWindow, WindowTable,
};
use advplan::{solve, Grid, Plan, SearchConfig, SearchOutcome, Task};

use error::{read_file, write_file, Category, CliError};

/// Plan, attack plans, and measure how badly plans can be attacked.
#[derive(Parser)]
#[command(name = "advplan", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a maze or a PDDL task and print the plan.
    Plan(PlanArgs),
    /// Generate solvable random mazes.
    GenMazes(GenMazesArgs),
    /// Build a pattern table of cost-increasing local changes.
    GenTable(GenTableArgs),
    /// Attack one instance under a chosen threat model.
    Attack(AttackArgs),
    /// Run a full experiment sweep and write its reports.
    Bench(BenchArgs),
    /// Rewrite a most-vital-arcs instance as a PDDL task.
    ReduceMvap(ReduceArgs),
    /// Check a plan file against its task and report the cost.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Bfs,
    Astar,
    Greedy,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HeuristicArg {
    Zero,
    Additive,
    GoalCount,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GridHeuristicArg {
    Euclidean,
    Manhattan,
}

impl From<GridHeuristicArg> for GridHeuristic {
    fn from(h: GridHeuristicArg) -> GridHeuristic {
        match h {
            GridHeuristicArg::Euclidean => GridHeuristic::Euclidean,
            GridHeuristicArg::Manhattan => GridHeuristic::Manhattan,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ThreatArg {
    InformedOnline,
    AgentHeuristicOnline,
    BlackBoxOnline,
    AgentHeuristicOffline,
    BlackBoxOffline,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SenseArg {
    Full,
    Adjacent,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AgentArg {
    Optimal,
    GreedyAdditive,
    GreedyGoalCount,
}

impl From<AgentArg> for AgentSearch {
    fn from(a: AgentArg) -> AgentSearch {
        match a {
            AgentArg::Optimal => AgentSearch::Optimal,
            AgentArg::GreedyAdditive => AgentSearch::GreedyAdditive,
            AgentArg::GreedyGoalCount => AgentSearch::GreedyGoalCount,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AdversaryArg {
    AstarAdditive,
    Bfs,
    AstarGoalCount,
}

impl From<AdversaryArg> for AdversarySearch {
    fn from(a: AdversaryArg) -> AdversarySearch {
        match a {
            AdversaryArg::AstarAdditive => AdversarySearch::AStarAdditive,
            AdversaryArg::Bfs => AdversarySearch::Bfs,
            AdversaryArg::AstarGoalCount => AdversarySearch::AStarGoalCount,
        }
    }
}

#[derive(Args)]
struct PlanArgs {
    /// ASCII maze file (S start, G goal, # wall, . free).
    #[arg(long, conflicts_with_all = ["domain", "problem"])]
    maze: Option<PathBuf>,
    /// PDDL domain file (requires --problem).
    #[arg(long, requires = "problem")]
    domain: Option<PathBuf>,
    /// PDDL problem file (requires --domain).
    #[arg(long, requires = "domain")]
    problem: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "astar")]
    algorithm: AlgorithmArg,
    /// Heuristic for task search (mazes take --grid-heuristic).
    #[arg(long, value_enum, default_value = "zero")]
    heuristic: HeuristicArg,
    #[arg(long, value_enum, default_value = "euclidean")]
    grid_heuristic: GridHeuristicArg,
    /// Node expansion budget for task search.
    #[arg(long, default_value_t = 1_000_000)]
    node_budget: u64,
    /// Also write the bare plan (or path) to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenMazesArgs {
    #[arg(long, default_value_t = 1)]
    count: u32,
    #[arg(long, default_value_t = 15)]
    width: i32,
    #[arg(long, default_value_t = 15)]
    height: i32,
    #[arg(long, default_value_t = 0.25)]
    wall_frequency: f64,
    /// Maze i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write maze-NNN.txt files here instead of printing to stdout.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct GenTableArgs {
    #[command(subcommand)]
    flavor: TableFlavor,
}

#[derive(Subcommand)]
enum TableFlavor {
    /// Wall-placement patterns mined from random mazes.
    Grid(GridTableArgs),
    /// Action-removal patterns mined from generated tasks.
    Strips(StripsTableArgs),
}

#[derive(Args)]
struct GridTableArgs {
    #[arg(long, default_value_t = 500)]
    instances: u64,
    #[arg(long, default_value_t = 15)]
    width: i32,
    #[arg(long, default_value_t = 15)]
    height: i32,
    #[arg(long, default_value_t = 0.25)]
    wall_frequency: f64,
    #[arg(long, default_value_t = 3)]
    window_size: usize,
    /// Drop patterns seen fewer times than this.
    #[arg(long, default_value_t = 0)]
    threshold: u64,
    /// Heuristic assumed for the victim's baseline path.
    #[arg(long, value_enum, default_value = "euclidean")]
    heuristic: GridHeuristicArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Free-form adversary note stored in the table metadata.
    #[arg(long, default_value = "informed")]
    adversary: String,
    /// Output table file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TaskCorpusArg {
    AirCargo,
    Blocks,
}

#[derive(Args)]
struct StripsTableArgs {
    #[arg(long, value_enum)]
    corpus: TaskCorpusArg,
    #[arg(long, default_value_t = 100)]
    instances: u64,
    #[arg(long, default_value_t = 4)]
    window_size: usize,
    #[arg(long, default_value_t = 0)]
    threshold: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    planes: usize,
    #[arg(long, default_value_t = 2)]
    cargos: usize,
    #[arg(long, default_value_t = 2)]
    airports: usize,
    #[arg(long, default_value_t = 4)]
    blocks: usize,
    /// Output table file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long, value_enum)]
    threat: ThreatArg,
    /// Number of adversarial changes allowed (≤ 10).
    #[arg(long, default_value_t = 1)]
    budget: u32,
    /// Pattern table file (not needed with --oracle).
    #[arg(long)]
    table: Option<PathBuf>,
    /// ASCII maze file (online threats).
    #[arg(long, conflicts_with_all = ["domain", "problem"])]
    maze: Option<PathBuf>,
    /// PDDL domain file (offline threats; requires --problem).
    #[arg(long, requires = "problem")]
    domain: Option<PathBuf>,
    #[arg(long, requires = "domain")]
    problem: Option<PathBuf>,
    /// The victim's heuristic on grids.
    #[arg(long, value_enum, default_value = "euclidean")]
    grid_heuristic: GridHeuristicArg,
    /// How the victim senses adversary walls.
    #[arg(long, value_enum, default_value = "full")]
    sense: SenseArg,
    /// The victim's planner on tasks.
    #[arg(long, value_enum, default_value = "optimal")]
    agent: AgentArg,
    /// The adversary's own search on tasks.
    #[arg(long, value_enum, default_value = "astar-additive")]
    adversary_search: AdversaryArg,
    /// Restart the adversary's search from scratch after each match.
    #[arg(long)]
    restart_on_match: bool,
    /// Exhaustive brute force instead of the pattern table.
    #[arg(long, conflicts_with = "table")]
    oracle: bool,
    /// Re-solve bound for the oracle (subsets × instances).
    #[arg(long, default_value_t = DEFAULT_RESOLVE_BOUND)]
    bound: u64,
    /// Print the online tick-by-tick transcript.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment config file; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. -s budgets=1,2 (repeatable).
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Write records.jsonl, report.csv, series CSVs and the resolved
    /// config here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    /// Arc-graph file: header line `nodes source target`, then one
    /// `from to cost` arc per line; # comments allowed.
    #[arg(long)]
    graph: PathBuf,
    /// Write the PDDL domain here (stdout when omitted).
    #[arg(long)]
    domain_out: Option<PathBuf>,
    /// Write the PDDL problem here (stdout when omitted).
    #[arg(long)]
    problem_out: Option<PathBuf>,
    /// Also report the strongest ≤ k-arc interdiction.
    #[arg(long)]
    max: Option<u32>,
    /// With --decide-threshold: answer the decision form on both sides
    /// of the reduction and check they agree.
    #[arg(long, requires = "decide_threshold")]
    decide: Option<u32>,
    #[arg(long, requires = "decide")]
    decide_threshold: Option<u64>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    problem: PathBuf,
    /// Plan file: one (action obj ...) per line, ; or # comments.
    #[arg(long)]
    plan: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::GenMazes(a) => cmd_gen_mazes(a),
        Command::GenTable(a) => cmd_gen_table(a),
        Command::Attack(a) => cmd_attack(a),
        Command::Bench(a) => cmd_bench(a),
        Command::ReduceMvap(a) => cmd_reduce(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            e.category.exit_code()
        }
    }
}

fn load_maze(path: &PathBuf) -> Result<Grid, CliError> {
    let text = read_file(path)?;
    Grid::from_ascii(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn load_task(domain: &PathBuf, problem: &PathBuf) -> Result<Task, CliError> {
    let d = read_file(domain)?;
    let p = read_file(problem)?;
    parse_task(&d, &p)
        .map(Task::ground)
        .map_err(|e| CliError::parse(format!("{}: {e}", problem.display())))
}

fn search_config(a: &PlanArgs) -> SearchConfig {
    use advplan::planner::{Algorithm, Heuristic, TieBreak};
    SearchConfig {
        algorithm: match a.algorithm {
            AlgorithmArg::Bfs => Algorithm::Bfs,
            AlgorithmArg::Astar => Algorithm::AStar,
            AlgorithmArg::Greedy => Algorithm::GreedyBestFirst,
        },
        heuristic: match a.heuristic {
            HeuristicArg::Zero => Heuristic::Zero,
            HeuristicArg::Additive => Heuristic::Additive,
            HeuristicArg::GoalCount => Heuristic::GoalCount,
        },
        node_budget: a.node_budget,
        tie_break: TieBreak::Canonical,
    }
}

fn cmd_plan(a: PlanArgs) -> Result<(), CliError> {
    if let Some(maze) = &a.maze {
        let grid = load_maze(maze)?;
        let path = astar_path(&grid, grid.start, grid.goal, a.grid_heuristic.into())
            .ok_or_else(|| CliError::unsolvable("no path from start to goal"))?;
        let mut body = String::new();
        for cell in &path {
            body.push_str(&format!("{cell}\n"));
        }
        print!("{body}");
        println!("cost: {}", path.len() - 1);
        if let Some(out) = &a.out {
            write_file(out, &body)?;
        }
        return Ok(());
    }
    let (Some(domain), Some(problem)) = (&a.domain, &a.problem) else {
        return Err(CliError::usage("pass either --maze or --domain with --problem"));
    };
    let task = load_task(domain, problem)?;
    let cfg = search_config(&a);
    let result = solve(&task, &cfg);
    match result.outcome {
        SearchOutcome::Plan(plan) => {
            let body = plan.to_text();
            print!("{body}");
            println!("cost: {}", plan.total_cost);
            println!("expanded: {}", result.expanded);
            if let Some(out) = &a.out {
                write_file(out, &body)?;
            }
            Ok(())
        }
        SearchOutcome::Unsolvable => Err(CliError::unsolvable("goal unreachable")),
        SearchOutcome::BudgetExhausted => Err(CliError::budget(format!(
            "node budget {} exhausted before an answer",
            cfg.node_budget
        ))),
    }
}

fn cmd_gen_mazes(a: GenMazesArgs) -> Result<(), CliError> {
    if !(1..=4096).contains(&a.width) || !(1..=4096).contains(&a.height) {
        return Err(CliError::usage("maze dimensions must be within 1..=4096"));
    }
    if !(0.0..1.0).contains(&a.wall_frequency) {
        return Err(CliError::usage("wall frequency must be in [0, 1)"));
    }
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError {
            category: Category::Io,
            message: format!("{}: {e}", dir.display()),
        })?;
    }
    for i in 0..a.count {
        let maze = generate_maze(a.width, a.height, a.wall_frequency, a.seed + u64::from(i))
            .map_err(CliError::other)?;
        match &a.out_dir {
            Some(dir) => write_file(&dir.join(format!("maze-{i:03}.txt")), &maze.to_ascii())?,
            None => {
                if i > 0 {
                    println!();
                }
                print!("{}", maze.to_ascii());
            }
        }
    }
    if let Some(dir) = &a.out_dir {
        println!("wrote {} mazes to {}", a.count, dir.display());
    }
    Ok(())
}

fn cmd_gen_table(a: GenTableArgs) -> Result<(), CliError> {
    match a.flavor {
        TableFlavor::Grid(g) => {
            if g.window_size % 2 == 0 || g.window_size < 3 {
                return Err(CliError::usage("window size must be odd and at least 3"));
            }
            let cfg = GridTableConfig {
                instances: g.instances,
                width: g.width,
                height: g.height,
                wall_frequency: g.wall_frequency,
                window_size: g.window_size,
                threshold: g.threshold,
                heuristic: g.heuristic.into(),
                adversary: g.adversary,
                seed: g.seed,
            };
            let table = build_grid_table(&cfg);
            write_file(&g.out, &table.to_text())?;
            println!(
                "wrote {} patterns ({} contributing instances) to {}",
                table.len(),
                table.meta.contributing,
                g.out.display()
            );
        }
        TableFlavor::Strips(s) => {
            if s.window_size < 2 {
                return Err(CliError::usage("window size must be at least 2"));
            }
            let cfg = StripsTableConfig {
                instances: s.instances,
                window_size: s.window_size,
                threshold: s.threshold,
                ..StripsTableConfig::new(s.instances, s.seed)
            };
            let table = match s.corpus {
                TaskCorpusArg::AirCargo => build_strips_table(&cfg, |seed| {
                    air_cargo_task(s.planes, s.cargos, s.airports, seed)
                }),
                TaskCorpusArg::Blocks => {
                    build_strips_table(&cfg, |seed| blocks_task(s.blocks, seed))
                }
            };
            write_file(&s.out, &table.to_text())?;
            println!(
                "wrote {} patterns ({} contributing instances) to {}",
                table.len(),
                table.meta.contributing,
                s.out.display()
            );
        }
    }
    Ok(())
}

fn threat_model(arg: ThreatArg, budget: u32, a: &AttackArgs) -> ThreatModel {
    match arg {
        ThreatArg::InformedOnline => ThreatModel::informed_online(budget),
        ThreatArg::AgentHeuristicOnline => {
            ThreatModel::agent_heuristic_online(budget, a.grid_heuristic.into())
        }
        ThreatArg::BlackBoxOnline => ThreatModel::black_box_online(budget),
        ThreatArg::AgentHeuristicOffline => {
            let agent: AgentSearch = a.agent.into();
            ThreatModel::agent_heuristic_offline(budget, agent.to_config().heuristic)
        }
        ThreatArg::BlackBoxOffline => ThreatModel::black_box_offline(budget),
    }
}

fn attack_error(e: AttackError) -> CliError {
    match e {
        AttackError::BaselineUnsolvable => {
            CliError::unsolvable("the baseline instance is already unsolvable")
        }
        AttackError::AgentBudgetExhausted => {
            CliError::budget("the victim's planner ran out of nodes on the baseline")
        }
        other => CliError::usage(other.to_string()),
    }
}

fn brute_error(e: BruteForceError) -> CliError {
    match e {
        BruteForceError::BaselineUnsolvable => {
            CliError::unsolvable("the baseline instance is already unsolvable")
        }
        BruteForceError::BoundExceeded { required, bound } => CliError::budget(format!(
            "{required} re-solves needed, bound is {bound} (raise --bound)"
        )),
    }
}

fn print_report(report: &AttackReport) {
    println!("baseline: {}", report.baseline_cost);
    println!("attacked: {}", report.attacked_cost);
    println!("success: {}", report.success);
    for change in &report.removed {
        println!("change: {change}");
    }
    if report.removed.is_empty() {
        println!("change: none");
    }
    if report.illegal_skipped > 0 {
        println!("illegal placements skipped: {}", report.illegal_skipped);
    }
    if report.adversary_budget_exhausted {
        println!("note: adversary search budget exhausted");
    }
}

fn cmd_attack(a: AttackArgs) -> Result<(), CliError> {
    let online = matches!(
        a.threat,
        ThreatArg::InformedOnline | ThreatArg::AgentHeuristicOnline | ThreatArg::BlackBoxOnline
    );
    let threat = threat_model(a.threat, a.budget, &a);
    if online {
        let Some(maze) = &a.maze else {
            return Err(CliError::usage("online threats attack a --maze"));
        };
        let grid = load_maze(maze)?;
        if a.oracle {
            let report = brute_force_attack_grid(&grid, a.grid_heuristic.into(), a.budget, a.bound)
                .map_err(brute_error)?;
            print_report(&report);
            return Ok(());
        }
        let Some(table_path) = &a.table else {
            return Err(CliError::usage("pass --table FILE or --oracle"));
        };
        let table: WindowTable<GridWindow> = WindowTable::parse(&read_file(table_path)?)
            .map_err(|e| CliError::parse(format!("{}: {e}", table_path.display())))?;
        let sense = match a.sense {
            SenseArg::Full => SenseMode::Full,
            SenseArg::Adjacent => SenseMode::Adjacent,
        };
        let (report, transcript) =
            online_attack(&grid, a.grid_heuristic.into(), &table, &threat, sense)
                .map_err(attack_error)?;
        print_report(&report);
        println!("steps walked: {}", transcript.walked.len());
        if a.trace {
            for t in &transcript.events {
                match t.cell {
                    Some(cell) => println!("tick {} {} {} {}", t.tick, t.actor, t.event, cell),
                    None => println!("tick {} {} {}", t.tick, t.actor, t.event),
                }
            }
        }
        return Ok(());
    }

    let (Some(domain), Some(problem)) = (&a.domain, &a.problem) else {
        return Err(CliError::usage("offline threats attack a --domain with --problem"));
    };
    let task = load_task(domain, problem)?;
    let agent: AgentSearch = a.agent.into();
    if a.oracle {
        let report = brute_force_attack_task(&task, &agent.to_config(), a.budget, a.bound)
            .map_err(brute_error)?;
        print_report(&report);
        return Ok(());
    }
    let Some(table_path) = &a.table else {
        return Err(CliError::usage("pass --table FILE or --oracle"));
    };
    let table: WindowTable<StripsWindow> = WindowTable::parse(&read_file(table_path)?)
        .map_err(|e| CliError::parse(format!("{}: {e}", table_path.display())))?;
    let adversary: AdversarySearch = a.adversary_search.into();
    let report = offline_attack(
        &task,
        &table,
        &threat,
        &adversary.to_config(),
        &agent.to_config(),
        a.restart_on_match,
    )
    .map_err(attack_error)?;
    print_report(&report);
    Ok(())
}

fn config_error(e: ConfigError) -> CliError {
    match e {
        ConfigError::Invalid(_) => CliError::usage(e.to_string()),
        _ => CliError::parse(e),
    }
}

fn cmd_bench(a: BenchArgs) -> Result<(), CliError> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::from_text(&read_file(path)?)
            .map_err(|e| CliError::parse(format!("{}: {}", path.display(), e)))?,
        None => ExperimentConfig::default(),
    };
    if !a.set.is_empty() {
        cfg = cfg.with_overrides(&a.set).map_err(config_error)?;
    }
    let result = run_experiment(&cfg).map_err(|HarnessError::Config(e)| config_error(e))?;
    println!(
        "table: {} patterns from {} contributing instances",
        result.table_entries, result.table_contributing
    );
    for row in &result.report.rows {
        println!(
            "{} k={}: success {}/{} ({:.1}%), mean increase {:.2}, unsolvable {}, errors {}",
            row.scenario,
            row.budget,
            row.successes,
            row.instances,
            100.0 * row.success_rate,
            row.mean_increase,
            row.unsolvable_after,
            row.errors
        );
    }
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError {
            category: Category::Io,
            message: format!("{}: {e}", dir.display()),
        })?;
        write_file(&dir.join("config.txt"), &result.config.to_text())?;
        write_file(&dir.join("records.jsonl"), &result.records_jsonl())?;
        write_file(&dir.join("report.csv"), &result.report.to_csv())?;
        write_file(&dir.join("success_series.csv"), &result.report.success_series_csv())?;
        write_file(&dir.join("increase_series.csv"), &result.report.increase_series_csv())?;
        println!("wrote reports to {}", dir.display());
    }
    Ok(())
}

/// How many subsets of size ≤ k an n-element set has, saturating.
fn subset_count(n: u64, k: u32) -> u64 {
    let mut total: u64 = 0;
    let mut term: u64 = 1;
    for i in 0..=u64::from(k) {
        if i > 0 {
            if i > n {
                break;
            }
            term = term.saturating_mul(n - i + 1) / i;
        }
        total = total.saturating_add(term);
    }
    total
}

fn cmd_reduce(a: ReduceArgs) -> Result<(), CliError> {
    let graph = ArcGraph::parse(&read_file(&a.graph)?)
        .map_err(|e| CliError::parse(format!("{}: {e}", a.graph.display())))?;
    let task = advplan::reduction::mvap_to_strips(&graph);
    let domain = domain_to_pddl(&task);
    let problem = problem_to_pddl(&task);
    match (&a.domain_out, &a.problem_out) {
        (Some(d), Some(p)) => {
            write_file(d, &domain)?;
            write_file(p, &problem)?;
            println!("wrote {} and {}", d.display(), p.display());
        }
        (None, None) => {
            print!("{domain}");
            println!();
            print!("{problem}");
        }
        _ => return Err(CliError::usage("pass both --domain-out and --problem-out or neither")),
    }
    if let Some(k) = a.max {
        check_interdiction_bound(&graph, k)?;
        let (cost, arcs) = max_arc_interdiction(&graph, k);
        println!("max interdiction (k={k}): cost {cost}, arcs {arcs:?}");
    }
    if let (Some(k), Some(h)) = (a.decide, a.decide_threshold) {
        check_interdiction_bound(&graph, k)?;
        let on_graph = decide_arc_interdiction(&graph, k, h);
        let on_task = decide_action_interdiction(&task, k, h);
        if on_graph != on_task {
            return Err(CliError::other(format!(
                "reduction mismatch: graph says {on_graph}, task says {on_task}"
            )));
        }
        println!("decision (k={k}, threshold={h}): {on_graph}");
    }
    Ok(())
}

fn check_interdiction_bound(graph: &ArcGraph, k: u32) -> Result<(), CliError> {
    let required = subset_count(graph.arcs.len() as u64, k);
    if required > INTERDICTION_BOUND {
        return Err(CliError::budget(format!(
            "{required} interdiction re-solves needed, bound is {INTERDICTION_BOUND}"
        )));
    }
    Ok(())
}

fn cmd_validate(a: ValidateArgs) -> Result<(), CliError> {
    let task = load_task(&a.domain, &a.problem)?;
    let text = read_file(&a.plan)?;
    let plan = Plan::from_text(&task, &text)
        .map_err(|e| CliError::parse(format!("{}: {e}", a.plan.display())))?;
    let cost = validate_plan(&task, &plan).map_err(|e| CliError::other(format!("invalid: {e}")))?;
    println!("valid, cost: {cost}, steps: {}", plan.len());
    Ok(())
}
