//! Training corpora: game records, self-play generation, the merged game
//! graph with NegaMax label propagation, and phase bucketing.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::board::{Position, Square, Wdl};
use crate::estimators::{
    clamp_boundary_labels, fit_gaussian, EstimatorError, LabeledExample, LogisticFitter, ModelKind, ModelParams,
    PhaseRange, PhaseTable, CLAMP_TRIALS,
};
use crate::evaluator::Evaluator;
use crate::features::{self, FeatureVector};
use crate::search::{iterative_deepening_with_rng, SearchError, SearchLimits};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: bad coordinate at offset {offset}")]
    Parse { line: usize, offset: usize },
    #[error("line {line}: illegal move at ply {ply}")]
    IllegalGame { line: usize, ply: usize },
    #[error("line {line}: game does not reach a terminal position")]
    IncompleteGame { line: usize },
    #[error("line {line}: stated differential {stated} but replay gives {actual}")]
    DifferentialMismatch { line: usize, stated: i32, actual: i32 },
    #[error("line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A complete game from the standard start. Passes are not stored; they are
/// inferred on replay.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameRecord {
    pub moves: Vec<Square>,
    /// Black's discs minus White's at the end.
    pub final_differential: i32,
}

impl GameRecord {
    /// Every position of the game in order, including pass-induced states,
    /// ending with the terminal position.
    pub fn positions(&self) -> Vec<Position> {
        positions_along(&self.moves).expect("records are validated on construction")
    }

    pub fn to_line(&self) -> String {
        let mut s = String::with_capacity(self.moves.len() * 2 + 4);
        for m in &self.moves {
            let _ = write!(s, "{m}");
        }
        let _ = write!(s, " {:+}", self.final_differential);
        s
    }
}

/// Positions visited when replaying `moves`, with forced passes inserted.
fn positions_along(moves: &[Square]) -> Result<Vec<Position>, usize> {
    let mut pos = Position::initial();
    let mut out = vec![pos];
    for (ply, &sq) in moves.iter().enumerate() {
        if pos.must_pass() {
            pos = pos.pass();
            out.push(pos);
        }
        pos = pos.apply_move(crate::board::Move::Place(sq)).map_err(|_| ply)?;
        out.push(pos);
    }
    if pos.must_pass() {
        pos = pos.pass();
        out.push(pos);
    }
    Ok(out)
}

/// Parses a run of concatenated coordinates such as `f5d6c3`.
pub fn parse_moves(s: &str) -> Result<Vec<Square>, usize> {
    let b = s.as_bytes();
    if !b.len().is_multiple_of(2) {
        return Err(b.len() - 1);
    }
    (0..b.len() / 2)
        .map(|i| {
            std::str::from_utf8(&b[2 * i..2 * i + 2])
                .ok()
                .and_then(|t| t.parse::<Square>().ok())
                .ok_or(2 * i)
        })
        .collect()
}

/// Parses one game per line: `<moves> [<signed differential>]`. Blank lines
/// and `#` comments are skipped.
pub fn parse_games(text: &str) -> Result<Vec<GameRecord>, CorpusError> {
    let mut games = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let lead = raw.len() - raw.trim_start().len();
        let mut parts = trimmed.split_whitespace();
        let move_text = parts.next().unwrap_or("");
        let moves = parse_moves(move_text).map_err(|off| CorpusError::Parse { line, offset: lead + off })?;
        let stated = match parts.next() {
            Some(t) => Some(t.parse::<i32>().map_err(|_| CorpusError::Parse {
                line,
                offset: lead + move_text.len() + 1,
            })?),
            None => None,
        };
        if parts.next().is_some() {
            return Err(CorpusError::Parse { line, offset: trimmed.len() });
        }
        let positions = positions_along(&moves).map_err(|ply| CorpusError::IllegalGame { line, ply })?;
        let end = positions.last().expect("non-empty");
        if !end.is_terminal() {
            return Err(CorpusError::IncompleteGame { line });
        }
        let actual = end.black_differential();
        if let Some(stated) = stated {
            if stated != actual {
                return Err(CorpusError::DifferentialMismatch { line, stated, actual });
            }
        }
        games.push(GameRecord { moves, final_differential: actual });
    }
    Ok(games)
}

pub fn serialize_games(records: &[GameRecord]) -> String {
    records.iter().map(|r| r.to_line() + "\n").collect()
}

/// Positions reached by move sequences (mid-game lines, one per line).
pub fn parse_positions(text: &str) -> Result<Vec<(Vec<Square>, Position)>, CorpusError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let first = trimmed.split_whitespace().next().unwrap_or("");
        let moves = parse_moves(first).map_err(|offset| CorpusError::Parse { line, offset })?;
        let positions = positions_along(&moves).map_err(|ply| CorpusError::IllegalGame { line, ply })?;
        out.push((moves, *positions.last().expect("non-empty")));
    }
    Ok(out)
}

/// All move sequences of length `k` from the start, keeping the first
/// sequence (in square order) for each distinct resulting position.
pub fn enumerate_openings(k: usize) -> Vec<Vec<Square>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    fn walk(
        p: Position,
        k: usize,
        stack: &mut Vec<Square>,
        seen: &mut HashSet<Position>,
        out: &mut Vec<Vec<Square>>,
    ) {
        if stack.len() == k {
            if seen.insert(p) {
                out.push(stack.clone());
            }
            return;
        }
        let p = if p.must_pass() { p.pass() } else { p };
        for sq in crate::board::squares(p.moves_mask()) {
            stack.push(sq);
            walk(p.play_unchecked(sq), k, stack, seen, out);
            stack.pop();
        }
    }
    walk(Position::initial(), k, &mut stack, &mut seen, &mut out);
    out
}

/// Plays one game from the end of `opening`, both sides searching with
/// `limits`; equal-valued moves are chosen between by `rng`.
pub fn play_out(
    opening: &[Square],
    eval: &dyn Evaluator,
    limits: &SearchLimits,
    rng: &mut ChaCha8Rng,
) -> Result<GameRecord, CorpusError> {
    let positions = positions_along(opening).map_err(|ply| CorpusError::IllegalGame { line: 0, ply })?;
    let mut pos = *positions.last().expect("non-empty");
    let mut moves = opening.to_vec();
    loop {
        if pos.is_terminal() {
            break;
        }
        if pos.must_pass() {
            pos = pos.pass();
            continue;
        }
        let r = iterative_deepening_with_rng(&pos, limits, eval, rng)?;
        match r.best_move {
            crate::board::Move::Place(sq) => {
                pos = pos.play_unchecked(sq);
                moves.push(sq);
            }
            crate::board::Move::Pass => pos = pos.pass(),
        }
    }
    Ok(GameRecord { moves, final_differential: pos.black_differential() })
}

/// One self-play game per opening. Game `i` draws its tie-breaks from a
/// ChaCha8 stream seeded by `seed` on stream `i`, so output is independent
/// of thread scheduling.
pub fn selfplay_generate(
    eval: &dyn Evaluator,
    openings: &[Vec<Square>],
    limits: &SearchLimits,
    seed: u64,
) -> Result<Vec<GameRecord>, CorpusError> {
    limits.validate()?;
    openings
        .par_iter()
        .enumerate()
        .map(|(i, opening)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            play_out(opening, eval, limits, &mut rng)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphNode {
    /// From the mover's perspective; `None` until labeled.
    pub label: Option<Wdl>,
    pub successors: BTreeSet<Position>,
    /// Mover's discs minus opponent's, for terminal nodes.
    pub terminal_differential: Option<i32>,
}

/// Every position of every game, keyed by position so transpositions merge.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GameGraph {
    nodes: BTreeMap<Position, GraphNode>,
}

impl GameGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, p: &Position) -> Option<&GraphNode> {
        self.nodes.get(p)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&Position, &GraphNode)> {
        self.nodes.iter()
    }

    pub fn predecessors(&self, p: &Position) -> usize {
        self.nodes.values().filter(|n| n.successors.contains(p)).count()
    }

    /// NegaMax value over labeled successors, `None` if none is labeled.
    fn negamax_label(&self, node: &GraphNode) -> Option<Wdl> {
        node.successors
            .iter()
            .filter_map(|s| self.nodes.get(s).and_then(|n| n.label))
            .map(Wdl::negate)
            .max()
    }

    /// True when every non-terminal labeled node equals the NegaMax value
    /// of its labeled successors.
    pub fn is_consistent(&self) -> bool {
        self.nodes.values().all(|n| {
            n.terminal_differential.is_some() || n.label.is_none() || n.label == self.negamax_label(n)
        })
    }
}

pub fn build_graph(records: &[GameRecord]) -> GameGraph {
    let mut g = GameGraph::default();
    for r in records {
        let positions = r.positions();
        for w in positions.windows(2) {
            g.nodes.entry(w[0]).or_insert_with(empty_node).successors.insert(w[1]);
        }
        let last = *positions.last().expect("non-empty");
        let node = g.nodes.entry(last).or_insert_with(empty_node);
        if let Some(o) = last.terminal_outcome() {
            node.terminal_differential = o.disc_differential;
            node.label = Some(o.label);
        }
    }
    g
}

fn empty_node() -> GraphNode {
    GraphNode { label: None, successors: BTreeSet::new(), terminal_differential: None }
}

/// Labels every node by NegaMax over its observed successors, working from
/// the leaves (most discs) toward the root.
pub fn propagate_labels(mut graph: GameGraph) -> GameGraph {
    // within one disc count, a forced-pass node precedes nothing it depends on
    let mut order: Vec<Position> = graph.nodes.keys().copied().collect();
    order.sort_by_key(|p| (std::cmp::Reverse(p.disc_count()), p.must_pass()));
    loop {
        let mut changed = false;
        for p in &order {
            let node = &graph.nodes[p];
            if node.terminal_differential.is_some() {
                continue;
            }
            let label = graph.negamax_label(node);
            if label != node.label {
                graph.nodes.get_mut(p).expect("key from map").label = label;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    graph
}

/// One example per labeled non-terminal node, in key order. Wins are
/// `(1, 1)`, losses `(0, 1)`, draws `(1/2, 1)`.
pub fn extract_examples(graph: &GameGraph) -> Vec<LabeledExample> {
    graph
        .nodes
        .iter()
        .filter(|(_, n)| n.terminal_differential.is_none())
        .filter_map(|(p, n)| {
            let label = n.label?;
            let x = features::extract(p).ok()?;
            Some(LabeledExample::new(x, label, p.disc_count()))
        })
        .collect()
}

/// Logistic: draws become `y = n/2` on the clamped trial scale, then boundary
/// labels are clamped. Gaussian kinds: wins and losses are emitted twice,
/// draws once as a win and once as a loss.
pub fn expand_draws(examples: Vec<LabeledExample>, kind: ModelKind) -> Vec<LabeledExample> {
    match kind {
        ModelKind::Logistic => clamp_boundary_labels(
            examples
                .into_iter()
                .map(|mut e| {
                    if e.is_draw() {
                        e.n *= CLAMP_TRIALS;
                        e.y = e.n as f64 / 2.0;
                    }
                    e
                })
                .collect(),
        ),
        ModelKind::Qda | ModelKind::Fisher => {
            let mut out = Vec::with_capacity(examples.len() * 2);
            for e in examples {
                if e.is_draw() {
                    out.push(LabeledExample { y: e.n as f64, ..e.clone() });
                    out.push(LabeledExample { y: 0.0, ..e });
                } else {
                    out.push(e.clone());
                    out.push(e);
                }
            }
            out
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseBucket {
    pub range: PhaseRange,
    /// Training set: every example within `overlap` discs of the range.
    pub examples: Vec<LabeledExample>,
    pub wins: usize,
    pub draws: usize,
    pub losses: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseBuckets {
    pub width: u32,
    pub overlap: u32,
    pub buckets: Vec<PhaseBucket>,
}

impl PhaseBuckets {
    pub fn report_csv(&self) -> String {
        let mut s = String::from("bucket_lo,bucket_hi,examples,wins,draws,losses\n");
        for b in &self.buckets {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                b.range.lo,
                b.range.hi,
                b.examples.len(),
                b.wins,
                b.draws,
                b.losses
            );
        }
        s
    }
}

/// Buckets `[4, 4+w-1], [4+w, 4+2w-1], …` up to 63 discs (a 64-disc position
/// is always terminal).
pub fn phase_ranges(width: u32) -> Vec<PhaseRange> {
    let width = width.max(1);
    (0..)
        .map(|k| 4 + k * width)
        .take_while(|&lo| lo <= 63)
        .map(|lo| PhaseRange { lo, hi: (lo + width - 1).min(63) })
        .collect()
}

pub fn bucket_by_phase(examples: &[LabeledExample], width: u32, overlap: u32) -> PhaseBuckets {
    let buckets = phase_ranges(width)
        .into_iter()
        .map(|range| {
            let lo = range.lo.saturating_sub(overlap);
            let hi = range.hi + overlap;
            let members: Vec<LabeledExample> =
                examples.iter().filter(|e| lo <= e.discs && e.discs <= hi).cloned().collect();
            let count = |w: Wdl| members.iter().filter(|e| outcome_class(e) == w).count();
            PhaseBucket { range, wins: count(Wdl::Win), draws: count(Wdl::Draw), losses: count(Wdl::Loss), examples: members }
        })
        .collect();
    PhaseBuckets { width: width.max(1), overlap, buckets }
}

fn outcome_class(e: &LabeledExample) -> Wdl {
    let frac = e.y / e.n as f64;
    if frac > 0.5 {
        Wdl::Win
    } else if frac < 0.5 {
        Wdl::Loss
    } else {
        Wdl::Draw
    }
}

#[derive(Debug)]
pub struct TrainedTable {
    pub table: PhaseTable,
    /// Buckets that could not be fitted, with the reason. Lookups for them
    /// fall through to the nearest fitted bucket.
    pub skipped: Vec<(PhaseRange, EstimatorError)>,
}

/// Fits one model of `kind` per bucket after draw expansion.
pub fn train_buckets(
    buckets: &PhaseBuckets,
    kind: ModelKind,
    fitter: &LogisticFitter,
) -> Result<TrainedTable, CorpusError> {
    let mut models = Vec::new();
    let mut skipped = Vec::new();
    for b in &buckets.buckets {
        let data = expand_draws(b.examples.clone(), kind);
        let fitted = match kind {
            ModelKind::Logistic => fitter.fit(&data).map(|m| ModelParams::logistic(m, b.range)),
            ModelKind::Qda => fit_gaussian(&data, false).map(|s| ModelParams::qda(s, b.range)),
            ModelKind::Fisher => fit_gaussian(&data, true).and_then(|s| ModelParams::fisher(s, b.range)),
        };
        match fitted {
            Ok(m) => models.push(m),
            Err(e) => skipped.push((b.range, e)),
        }
    }
    if models.is_empty() {
        return Err(match skipped.pop() {
            Some((_, e)) => e.into(),
            None => EstimatorError::Empty.into(),
        });
    }
    Ok(TrainedTable { table: PhaseTable::new(models)?, skipped })
}

/// Labeled examples as CSV with header `discs,y,n,f0..f{n-1}`.
pub fn write_examples_csv(examples: &[LabeledExample]) -> String {
    let width = examples.first().map_or(features::NUM_FEATURES, |e| e.x.len());
    let mut s = String::from("discs,y,n");
    for k in 0..width {
        let _ = write!(s, ",f{k}");
    }
    s.push('\n');
    for e in examples {
        let _ = write!(s, "{},{},{}", e.discs, e.y, e.n);
        for v in e.x.values() {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

pub fn read_examples_csv(text: &str) -> Result<Vec<LabeledExample>, CorpusError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(CorpusError::Csv { line: 1, msg: "missing header".into() })?;
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.len() < 5 || cols[..3] != ["discs", "y", "n"] {
        return Err(CorpusError::Csv { line: 1, msg: format!("bad header {header:?}") });
    }
    for (k, c) in cols[3..].iter().enumerate() {
        if *c != format!("f{k}") {
            return Err(CorpusError::Csv { line: 1, msg: format!("bad feature column {c:?}") });
        }
    }
    let width = cols.len() - 3;
    lines
        .map(|(idx, l)| {
            let line = idx + 1;
            let bad = |msg: String| CorpusError::Csv { line, msg };
            let fields: Vec<&str> = l.trim().split(',').collect();
            if fields.len() != width + 3 {
                return Err(bad(format!("expected {} fields, found {}", width + 3, fields.len())));
            }
            let discs = fields[0].parse::<u32>().map_err(|_| bad(format!("bad discs {:?}", fields[0])))?;
            let y = fields[1].parse::<f64>().map_err(|_| bad(format!("bad y {:?}", fields[1])))?;
            let n = fields[2].parse::<u32>().map_err(|_| bad(format!("bad n {:?}", fields[2])))?;
            if n == 0 || !(0.0..=n as f64).contains(&y) {
                return Err(bad(format!("need 0 <= y <= n and n >= 1, found y={y} n={n}")));
            }
            let values = fields[3..]
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| bad(format!("bad feature value {f:?}"))))
                .collect::<Result<Vec<f64>, _>>()?;
            let x = FeatureVector::new(values).ok_or_else(|| bad("intercept must be 1 and values finite".into()))?;
            Ok(LabeledExample { x, y, n, discs })
        })
        .collect()
}
