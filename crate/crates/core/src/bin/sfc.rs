//! `sfc`: generate, label, train, evaluate and compare Othello evaluators.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use sfc_core::arena::{self, EngineConfig};
use sfc_core::corpus;
use sfc_core::estimators::{win_probability, LogisticFitter, ModelKind, PhaseTable};
use sfc_core::evaluator::{Evaluator, HeuristicEval};
use sfc_core::features;
use sfc_core::search::SearchLimits;

#[derive(Parser, Debug)]
#[command(name = "sfc", version, about = "Othello evaluation-function workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Self-play one game from every enumerated opening.
    Generate(GenerateArgs),
    /// Merge games into a graph, propagate results, write labeled examples.
    Label(LabelArgs),
    /// Fit one model per disc-count bucket.
    Train(TrainArgs),
    /// Print the winning probability of each position in a file.
    Eval(EvalArgs),
    /// Dump score, probability and observed result per example as CSV.
    Curve(CurveArgs),
    /// Paired-game tournament between engine configurations.
    Tournament(TournamentArgs),
    /// Random opening book of distinct positions.
    Book(BookArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Output game file.
    #[arg(long)]
    out: PathBuf,
    /// Length of the enumerated opening sequences.
    #[arg(long, default_value_t = 2)]
    openings_len: usize,
    #[arg(long, default_value_t = 3)]
    depth: u32,
    /// Solve exactly at or below this many empty squares.
    #[arg(long, default_value_t = 10)]
    wdl_empties: u32,
    /// Repeat every opening this many times with different tie-breaks.
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Model directory; the built-in heuristic is used when absent.
    #[arg(long)]
    models: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct LabelArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Labeled-example CSV.
    #[arg(long)]
    out: PathBuf,
    /// Also write a per-bucket count report.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    width: u32,
    #[arg(long, default_value_t = 2)]
    overlap: u32,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// logit, fisher or qda.
    #[arg(long, value_parser = parse_kind)]
    kind: ModelKind,
    #[arg(long = "in")]
    input: PathBuf,
    /// Model directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 4)]
    width: u32,
    #[arg(long, default_value_t = 2)]
    overlap: u32,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    models: PathBuf,
    /// One move sequence per line.
    #[arg(long)]
    positions: PathBuf,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long)]
    models: PathBuf,
    /// Labeled-example CSV.
    #[arg(long = "in")]
    input: PathBuf,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TournamentArgs {
    /// Comma-separated engine configuration files.
    #[arg(long, value_delimiter = ',', required = true)]
    engines: Vec<PathBuf>,
    /// Opening book, one move sequence per line.
    #[arg(long)]
    openings: PathBuf,
    /// Number of opening pairs to play.
    #[arg(long, default_value_t = 50)]
    pairs: usize,
    /// Take the first openings in file order instead of the most balanced.
    #[arg(long)]
    no_select: bool,
    #[arg(long, default_value_t = arena::DEFAULT_LEVEL)]
    level: f64,
    /// Also write the report as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BookArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Plies per line; 10 plies give 14 discs.
    #[arg(long, default_value_t = 10)]
    plies: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Engine file contents. Relative model paths resolve against the file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EngineFile {
    name: String,
    models: Option<PathBuf>,
    #[serde(default = "default_depth")]
    depth: u32,
    #[serde(default = "default_wdl")]
    wdl_empties: u32,
    node_budget: Option<u64>,
}

fn default_depth() -> u32 {
    SearchLimits::default().max_depth
}

fn default_wdl() -> u32 {
    SearchLimits::default().wdl_empties_threshold
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    s.parse::<ModelKind>().map_err(|_| format!("unknown model kind {s:?}; expected logit, fisher or qda"))
}

type Fallible<T> = Result<T, Box<dyn std::error::Error>>;

fn read(path: &Path) -> Fallible<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn write(path: &Path, text: &str) -> Fallible<()> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load_models(dir: &Path) -> Fallible<PhaseTable> {
    PhaseTable::load_dir(dir).map_err(|e| format!("{}: {e}", dir.display()).into())
}

fn generate(a: &GenerateArgs) -> Fallible<()> {
    let limits = SearchLimits { max_depth: a.depth, wdl_empties_threshold: a.wdl_empties, node_budget: None };
    let eval: Box<dyn Evaluator> = match &a.models {
        Some(dir) => Box::new(load_models(dir)?),
        None => Box::new(HeuristicEval),
    };
    let base = corpus::enumerate_openings(a.openings_len);
    let openings: Vec<_> = (0..a.repeats.max(1)).flat_map(|_| base.iter().cloned()).collect();
    let games = corpus::selfplay_generate(eval.as_ref(), &openings, &limits, a.seed)?;
    write(&a.out, &corpus::serialize_games(&games))?;
    eprintln!("wrote {} games from {} openings to {}", games.len(), base.len(), a.out.display());
    Ok(())
}

fn label(a: &LabelArgs) -> Fallible<()> {
    let games = corpus::parse_games(&read(&a.input)?).map_err(|e| format!("{}: {e}", a.input.display()))?;
    let graph = corpus::propagate_labels(corpus::build_graph(&games));
    let examples = corpus::extract_examples(&graph);
    write(&a.out, &corpus::write_examples_csv(&examples))?;
    if let Some(report) = &a.report {
        write(report, &corpus::bucket_by_phase(&examples, a.width, a.overlap).report_csv())?;
    }
    eprintln!("{} games, {} graph nodes, {} labeled examples", games.len(), graph.len(), examples.len());
    Ok(())
}

fn train(a: &TrainArgs) -> Fallible<()> {
    let examples = corpus::read_examples_csv(&read(&a.input)?).map_err(|e| format!("{}: {e}", a.input.display()))?;
    let buckets = corpus::bucket_by_phase(&examples, a.width, a.overlap);
    let fitter = LogisticFitter::new(a.tol, a.max_iter.max(1)).regularized(true);
    let trained = corpus::train_buckets(&buckets, a.kind, &fitter)?;
    for (range, why) in &trained.skipped {
        eprintln!("skipped bucket {}..{}: {why}", range.lo, range.hi);
    }
    let paths = trained.table.save_dir(&a.out)?;
    eprintln!("wrote {} {} models to {}", paths.len(), a.kind.name(), a.out.display());
    Ok(())
}

fn eval(a: &EvalArgs) -> Fallible<()> {
    let table = load_models(&a.models)?;
    let positions = corpus::parse_positions(&read(&a.positions)?).map_err(|e| format!("{}: {e}", a.positions.display()))?;
    for (moves, p) in positions {
        let line: String = moves.iter().map(|m| m.to_string()).collect();
        let line = if line.is_empty() { "-".to_string() } else { line };
        match table.evaluate(&p) {
            Ok(v) => println!("{line} {v:.6}"),
            Err(e) => println!("{line} error: {e}"),
        }
    }
    Ok(())
}

fn curve(a: &CurveArgs) -> Fallible<()> {
    let table = load_models(&a.models)?;
    let examples = corpus::read_examples_csv(&read(&a.input)?).map_err(|e| format!("{}: {e}", a.input.display()))?;
    let mut s = String::from("discs,score,probability,observed\n");
    for e in &examples {
        if e.x.len() != features::NUM_FEATURES {
            return Err(format!("example has {} features, models expect {}", e.x.len(), features::NUM_FEATURES).into());
        }
        let score = table.lookup(e.discs).score(&e.x)?;
        let _ = writeln!(s, "{},{score},{},{}", e.discs, win_probability(score), e.y / e.n as f64);
    }
    match &a.out {
        Some(path) => write(path, &s)?,
        None => print!("{s}"),
    }
    Ok(())
}

fn load_engine(path: &Path) -> Fallible<EngineConfig> {
    let file: EngineFile = toml::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    let limits = SearchLimits { max_depth: file.depth, wdl_empties_threshold: file.wdl_empties, node_budget: file.node_budget };
    limits.validate().map_err(|e| format!("{}: {e}", path.display()))?;
    let eval: Arc<dyn Evaluator> = match &file.models {
        Some(dir) => {
            let dir = if dir.is_relative() { path.parent().unwrap_or(Path::new(".")).join(dir) } else { dir.clone() };
            Arc::new(load_models(&dir)?)
        }
        None => Arc::new(HeuristicEval),
    };
    eprintln!("engine {}: models={:?} {limits:?}", file.name, file.models);
    Ok(EngineConfig::new(file.name, eval, limits))
}

fn tournament(a: &TournamentArgs) -> Fallible<()> {
    let engines = a.engines.iter().map(|p| load_engine(p)).collect::<Fallible<Vec<_>>>()?;
    let book: Vec<_> = corpus::parse_positions(&read(&a.openings)?)
        .map_err(|e| format!("{}: {e}", a.openings.display()))?
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let openings = if a.no_select {
        if book.len() < a.pairs {
            return Err(format!("book has {} positions, {} requested", book.len(), a.pairs).into());
        }
        book[..a.pairs].to_vec()
    } else {
        let judge = engines.first().ok_or("no engines")?;
        arena::select_openings(&book, judge.eval.as_ref(), a.pairs)?
    };
    let mut report = arena::run_tournament(&openings, &engines, &arena::round_robin(&engines))?;
    report.level = a.level;
    print!("{}", report.to_table());
    if let Some(path) = &a.csv {
        write(path, &report.to_csv())?;
    }
    if report.rows.iter().any(|r| r.outcome.is_err()) {
        return Err("one or more pairings aborted".into());
    }
    Ok(())
}

fn book(a: &BookArgs) -> Fallible<()> {
    let lines = arena::random_book(a.count, a.plies, a.seed);
    let text: String = lines.iter().map(|l| l.iter().map(|m| m.to_string()).collect::<String>() + "\n").collect();
    write(&a.out, &text)?;
    eprintln!("wrote {} openings to {}", lines.len(), a.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    eprintln!("config: {:?}", cli.command);
    let seed = match &cli.command {
        Command::Generate(a) => a.seed,
        Command::Book(a) => a.seed,
        _ => 0,
    };
    eprintln!("seed: {seed}");
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Label(a) => label(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Curve(a) => curve(a),
        Command::Tournament(a) => tournament(a),
        Command::Book(a) => book(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
