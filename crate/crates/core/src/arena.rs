//! Paired-game tournaments, winning percentages and significance.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, Normal};
use thiserror::Error;

use crate::board::{Color, Move, Position, Square, Wdl};
use crate::evaluator::Evaluator;
use crate::search::{iterative_deepening, SearchError, SearchLimits};

#[derive(Debug, Error)]
pub enum ArenaError {
    #[error("only {found} openings evaluate within [0.4, 0.6], {needed} requested")]
    InsufficientBalancedOpenings { needed: usize, found: usize },
    #[error("opening {0} is terminal")]
    TerminalOpening(usize),
    #[error("duplicate engine name {0:?}")]
    DuplicateEngine(String),
    #[error("unknown engine {0:?}")]
    UnknownEngine(String),
    #[error("a tournament needs at least one opening and two engines")]
    NotEnoughEntrants,
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Clone)]
pub struct EngineConfig {
    pub name: String,
    pub eval: Arc<dyn Evaluator>,
    pub limits: SearchLimits,
}

impl fmt::Debug for EngineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EngineConfig").field("name", &self.name).field("limits", &self.limits).finish()
    }
}

impl EngineConfig {
    pub fn new(name: impl Into<String>, eval: Arc<dyn Evaluator>, limits: SearchLimits) -> EngineConfig {
        EngineConfig { name: name.into(), eval, limits }
    }
}

/// One finished game, seen from engine A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameResult {
    pub opening: Position,
    pub a_colour: Color,
    /// Moves played after the opening, passes included.
    pub moves: Vec<Move>,
    /// A's discs minus B's at the end.
    pub differential: i32,
    pub result: Wdl,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchTally {
    pub wins: u32,
    pub draws: u32,
    pub losses: u32,
    pub games: Vec<GameResult>,
}

impl MatchTally {
    pub fn from_counts(wins: u32, draws: u32, losses: u32) -> MatchTally {
        MatchTally { wins, draws, losses, games: Vec::new() }
    }

    pub fn total(&self) -> u32 {
        self.wins + self.draws + self.losses
    }

    pub fn record(&mut self, g: GameResult) {
        match g.result {
            Wdl::Win => self.wins += 1,
            Wdl::Draw => self.draws += 1,
            Wdl::Loss => self.losses += 1,
        }
        self.games.push(g);
    }

    /// The same games from B's side.
    pub fn reversed(&self) -> MatchTally {
        MatchTally {
            wins: self.losses,
            draws: self.draws,
            losses: self.wins,
            games: self
                .games
                .iter()
                .map(|g| GameResult {
                    a_colour: g.a_colour.opponent(),
                    differential: -g.differential,
                    result: g.result.negate(),
                    ..g.clone()
                })
                .collect(),
        }
    }
}

/// `(wins + draws/2) / games`, or 0.5 for an empty tally.
pub fn winning_percentage(t: &MatchTally) -> f64 {
    if t.total() == 0 {
        return 0.5;
    }
    (t.wins as f64 + 0.5 * t.draws as f64) / t.total() as f64
}

/// Winning percentage to one decimal, rounded half up in exact integer
/// arithmetic, e.g. `61.8%`.
pub fn format_percentage(t: &MatchTally) -> String {
    let n = t.total() as u64;
    if n == 0 {
        return "50.0%".into();
    }
    let points2 = 2 * t.wins as u64 + t.draws as u64;
    let tenths = (2 * 1000 * points2 + 2 * n) / (4 * n);
    format!("{}.{}%", tenths / 10, tenths % 10)
}

/// Conservative p-value: the larger of an exact two-sided sign test on the
/// decisive games and a normal test on the draws-as-half score.
pub fn significance(t: &MatchTally, level: f64) -> (f64, bool) {
    let p = sign_test(t.wins, t.losses).max(normal_test(t));
    (p, p < level)
}

fn sign_test(wins: u32, losses: u32) -> f64 {
    let decisive = (wins + losses) as u64;
    if decisive == 0 {
        return 1.0;
    }
    let binom = Binomial::new(0.5, decisive).expect("valid parameters");
    (2.0 * binom.cdf(wins.min(losses) as u64)).min(1.0)
}

fn normal_test(t: &MatchTally) -> f64 {
    let n = t.total() as f64;
    if n == 0.0 {
        return 1.0;
    }
    // (score - 1/2) / (0.5 / sqrt(n)) with score = (w + d/2) / n
    let z = (t.wins as f64 - t.losses as f64) / n.sqrt();
    let std = Normal::standard();
    (2.0 * std.sf(z.abs())).min(1.0)
}

/// The `count` book positions evaluated closest to 0.5, keeping input order
/// among ties; only evaluations in `[0.4, 0.6]` qualify.
pub fn select_openings(
    book: &[Position],
    eval: &dyn Evaluator,
    count: usize,
) -> Result<Vec<Position>, ArenaError> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut scored: Vec<(f64, usize)> = book
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_terminal())
        .map(|(i, p)| (eval.probability(p), i))
        .filter(|(v, _)| (0.4..=0.6).contains(v))
        .map(|(v, i)| ((v - 0.5).abs(), i))
        .collect();
    if scored.len() < count {
        return Err(ArenaError::InsufficientBalancedOpenings { needed: count, found: scored.len() });
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(scored[..count].iter().map(|&(_, i)| book[i]).collect())
}

fn play_game(opening: &Position, a: &EngineConfig, b: &EngineConfig, a_colour: Color) -> Result<GameResult, ArenaError> {
    let mut pos = *opening;
    let mut moves = Vec::new();
    while !pos.is_terminal() {
        let mv = if pos.must_pass() {
            Move::Pass
        } else {
            let engine = if pos.to_move() == a_colour { a } else { b };
            iterative_deepening(&pos, &engine.limits, engine.eval.as_ref())?.best_move
        };
        pos = pos.apply_move(mv).expect("search returns legal moves");
        moves.push(mv);
    }
    let black = pos.black_differential();
    let differential = if a_colour == Color::Black { black } else { -black };
    Ok(GameResult { opening: *opening, a_colour, moves, differential, result: Wdl::from_differential(differential) })
}

/// A takes the opening's side to move, then the return game with colours
/// reversed.
pub fn play_pair(
    opening: &Position,
    a: &EngineConfig,
    b: &EngineConfig,
) -> Result<(GameResult, GameResult), ArenaError> {
    if opening.is_terminal() {
        return Err(ArenaError::TerminalOpening(0));
    }
    let first = opening.to_move();
    Ok((play_game(opening, a, b, first)?, play_game(opening, a, b, first.opponent())?))
}

/// Plays every opening pair; results are aggregated in opening order.
pub fn play_match(openings: &[Position], a: &EngineConfig, b: &EngineConfig) -> Result<MatchTally, ArenaError> {
    a.limits.validate()?;
    b.limits.validate()?;
    if let Some(i) = openings.iter().position(Position::is_terminal) {
        return Err(ArenaError::TerminalOpening(i));
    }
    let pairs = openings
        .par_iter()
        .map(|o| play_pair(o, a, b))
        .collect::<Result<Vec<_>, _>>()?;
    let mut tally = MatchTally::default();
    for (g1, g2) in pairs {
        tally.record(g1);
        tally.record(g2);
    }
    Ok(tally)
}

#[derive(Debug, Clone)]
pub struct PairingRow {
    pub a: String,
    pub b: String,
    /// `Err` holds the reason the pairing was aborted.
    pub outcome: Result<MatchTally, String>,
}

impl PairingRow {
    pub fn label(&self) -> String {
        format!("{} - {}", self.a, self.b)
    }
}

#[derive(Debug, Clone)]
pub struct TournamentReport {
    pub rows: Vec<PairingRow>,
    pub level: f64,
}

pub const DEFAULT_LEVEL: f64 = 0.05;

pub fn run_tournament(
    openings: &[Position],
    engines: &[EngineConfig],
    pairings: &[(String, String)],
) -> Result<TournamentReport, ArenaError> {
    if openings.is_empty() || engines.len() < 2 {
        return Err(ArenaError::NotEnoughEntrants);
    }
    let mut names = HashSet::new();
    for e in engines {
        if !names.insert(e.name.as_str()) {
            return Err(ArenaError::DuplicateEngine(e.name.clone()));
        }
    }
    let find = |n: &str| {
        engines.iter().find(|e| e.name == n).ok_or_else(|| ArenaError::UnknownEngine(n.to_string()))
    };
    let mut rows = Vec::with_capacity(pairings.len());
    for (an, bn) in pairings {
        let (a, b) = (find(an)?, find(bn)?);
        let outcome = play_match(openings, a, b).map_err(|e| e.to_string());
        rows.push(PairingRow { a: an.clone(), b: bn.clone(), outcome });
    }
    Ok(TournamentReport { rows, level: DEFAULT_LEVEL })
}

/// Every unordered pair of engines, in list order.
pub fn round_robin(engines: &[EngineConfig]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for i in 0..engines.len() {
        for j in i + 1..engines.len() {
            out.push((engines[i].name.clone(), engines[j].name.clone()));
        }
    }
    out
}

impl TournamentReport {
    pub fn to_table(&self) -> String {
        let width = self.rows.iter().map(|r| r.label().len()).max().unwrap_or(0).max("Pairing".len());
        let mut s = String::new();
        let _ = writeln!(s, "{:<width$}  {:>15}  {:>11}  {:>8}", "Pairing", "Result (W-D-L)", "Winning %", "p-value");
        for r in &self.rows {
            match &r.outcome {
                Ok(t) => {
                    let (p, sig) = significance(t, self.level);
                    let _ = writeln!(
                        s,
                        "{:<width$}  {:>15}  {:>11}  {:>8.4}{}",
                        r.label(),
                        format!("{}-{}-{}", t.wins, t.draws, t.losses),
                        format_percentage(t),
                        p,
                        if sig { " *" } else { "" }
                    );
                }
                Err(reason) => {
                    let _ = writeln!(s, "{:<width$}  aborted: {reason}", r.label());
                }
            }
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("pairing,wins,draws,losses,win_pct,p_value,significant\n");
        for r in &self.rows {
            if let Ok(t) = &r.outcome {
                let (p, sig) = significance(t, self.level);
                let pct = format_percentage(t);
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{:.6},{}",
                    r.label(),
                    t.wins,
                    t.draws,
                    t.losses,
                    pct.trim_end_matches('%'),
                    p,
                    sig
                );
            }
        }
        s
    }
}

/// Random move sequences of `plies` moves from the start, distinct by
/// resulting position. Sequences that hit a pass are discarded.
pub fn random_book(count: usize, plies: usize, seed: u64) -> Vec<Vec<Square>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < count.saturating_mul(1000).max(1000) {
        attempts += 1;
        let mut pos = Position::initial();
        let mut line = Vec::with_capacity(plies);
        while line.len() < plies {
            let moves: Vec<Square> = crate::board::squares(pos.moves_mask()).collect();
            let Some(&sq) = moves.choose(&mut rng) else { break };
            pos = pos.play_unchecked(sq);
            line.push(sq);
        }
        if line.len() == plies && !pos.is_terminal() && seen.insert(pos) {
            out.push(line);
        }
    }
    out
}
