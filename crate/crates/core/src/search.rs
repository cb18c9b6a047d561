//! Move selection on the probability scale.
//!
//! Values are winning probabilities of the side to move, so negation is
//! `v -> 1 - v`. Internally the search runs on the centred value `v - 1/2`,
//! where negation is exact in floating point; this keeps NegaScout and plain
//! negamax bit-identical.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::board::{moves_mask, squares, Move, Position, Square, Wdl, CORNERS};
use crate::evaluator::Evaluator;

/// Upper bound on `SearchLimits::wdl_empties_threshold` and on the empties
/// `solve_wdl` accepts.
pub const MAX_WDL_EMPTIES: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("cannot search a terminal position")]
    TerminalPosition,
    #[error("{0} empties exceed the win-draw-loss solver limit of {MAX_WDL_EMPTIES}")]
    TooManyEmpties(u32),
    #[error("invalid search limits: {0}")]
    InvalidLimits(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_depth: u32,
    pub wdl_empties_threshold: u32,
    pub node_budget: Option<u64>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_depth: 4, wdl_empties_threshold: 12, node_budget: None }
    }
}

impl SearchLimits {
    pub fn depth(max_depth: u32) -> SearchLimits {
        SearchLimits { max_depth, ..SearchLimits::default() }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.max_depth < 1 {
            return Err(SearchError::InvalidLimits("max_depth must be at least 1"));
        }
        if self.wdl_empties_threshold > MAX_WDL_EMPTIES {
            return Err(SearchError::InvalidLimits("wdl_empties_threshold must be at most 20"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchResult {
    pub best_move: Move,
    /// Probability-scale value of the root for the side to move.
    pub score: f64,
    pub depth_reached: u32,
    pub nodes: u64,
    /// Set when the result comes from the win-draw-loss solver.
    pub exact: Option<Wdl>,
}

#[inline]
fn centred_terminal(p: &Position) -> f64 {
    let diff = p.own().count_ones() as i32 - p.opp().count_ones() as i32;
    Wdl::from_differential(diff).value() - 0.5
}

/// Child ordering inside NegaScout. Only speed depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MoveOrder {
    /// Corners first, then by the opponent's resulting mobility.
    #[default]
    Heuristic,
    /// Ascending square index.
    Squares,
    /// Descending square index.
    Reversed,
}

struct Searcher<'a> {
    eval: &'a dyn Evaluator,
    order: MoveOrder,
    nodes: u64,
    budget: Option<u64>,
    may_abort: bool,
    aborted: bool,
}

impl<'a> Searcher<'a> {
    fn new(eval: &'a dyn Evaluator) -> Self {
        Searcher { eval, order: MoveOrder::Heuristic, nodes: 0, budget: None, may_abort: false, aborted: false }
    }

    #[inline]
    fn leaf(&self, p: &Position) -> f64 {
        self.eval.probability(p) - 0.5
    }

    fn negamax(&mut self, p: &Position, depth: u32) -> f64 {
        self.nodes += 1;
        let mask = p.moves_mask();
        if mask == 0 && moves_mask(p.opp(), p.own()) == 0 {
            return centred_terminal(p);
        }
        if depth == 0 {
            return self.leaf(p);
        }
        if mask == 0 {
            return -self.negamax(&p.pass(), depth - 1);
        }
        squares(mask)
            .map(|sq| -self.negamax(&p.play_unchecked(sq), depth - 1))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn out_of_nodes(&mut self) -> bool {
        if self.may_abort && self.budget.is_some_and(|b| self.nodes > b) {
            self.aborted = true;
        }
        self.aborted
    }

    /// Fail-soft NegaScout on the centred scale.
    fn negascout(&mut self, p: &Position, depth: u32, alpha: f64, beta: f64) -> f64 {
        self.nodes += 1;
        if self.out_of_nodes() {
            return 0.0;
        }
        let mask = p.moves_mask();
        if mask == 0 && moves_mask(p.opp(), p.own()) == 0 {
            return centred_terminal(p);
        }
        if depth == 0 {
            return self.leaf(p);
        }
        if mask == 0 {
            return -self.negascout(&p.pass(), depth - 1, -beta, -alpha);
        }
        let children = match self.order {
            MoveOrder::Heuristic => ordered_children(p, mask, None, depth > 1),
            MoveOrder::Squares => ordered_children(p, mask, None, false),
            MoveOrder::Reversed => {
                let mut c = ordered_children(p, mask, None, false);
                c.reverse();
                c
            }
        };
        let mut best = f64::NEG_INFINITY;
        for (i, (_, child)) in children.iter().enumerate() {
            let a = alpha.max(best);
            let t = if i == 0 {
                -self.negascout(child, depth - 1, -beta, -a)
            } else {
                let t = -self.negascout(child, depth - 1, -a.next_up(), -a);
                if t > a && t < beta {
                    -self.negascout(child, depth - 1, -beta, -a)
                } else {
                    t
                }
            };
            if t > best {
                best = t;
                if best >= beta {
                    break;
                }
            }
        }
        best
    }

    /// Exact win-draw-loss value (+1/0/-1) by alpha-beta.
    fn wdl(&mut self, p: &Position, mut alpha: i8, beta: i8) -> i8 {
        self.nodes += 1;
        let mask = p.moves_mask();
        if mask == 0 {
            if moves_mask(p.opp(), p.own()) == 0 {
                let diff = p.own().count_ones() as i32 - p.opp().count_ones() as i32;
                return diff.signum() as i8;
            }
            return -self.wdl(&p.pass(), -beta, -alpha);
        }
        let mut best = -1;
        for (_, child) in ordered_children(p, mask, None, p.empties() > 4) {
            let v = -self.wdl(&child, -beta, -alpha);
            if v > best {
                best = v;
                if best > alpha {
                    alpha = best;
                }
                if alpha >= beta {
                    break;
                }
            }
        }
        best
    }
}

/// Children in search order: `first` (if given), then corners, then by the
/// opponent's mobility after the move. Stable, so equal keys keep square
/// order. With `sort` false the square order is kept as is.
fn ordered_children(p: &Position, mask: u64, first: Option<Square>, sort: bool) -> Vec<(Square, Position)> {
    let mut children: Vec<(Square, Position)> = squares(mask).map(|sq| (sq, p.play_unchecked(sq))).collect();
    if sort {
        children.sort_by_cached_key(|(sq, child)| move_key(*sq, child, first));
    }
    children
}

fn move_key(sq: Square, child: &Position, first: Option<Square>) -> (u8, u32) {
    let class = if Some(sq) == first {
        0
    } else if sq.bit() & CORNERS != 0 {
        1
    } else {
        2
    };
    (class, child.moves_mask().count_ones())
}

fn check_searchable(p: &Position) -> Result<(), SearchError> {
    if p.is_terminal() {
        Err(SearchError::TerminalPosition)
    } else {
        Ok(())
    }
}

/// Plain fixed-depth negamax. Terminal positions inside the horizon score
/// exactly 1, 1/2 or 0; a forced pass consumes one ply.
pub fn negamax_eval(p: &Position, depth: u32, eval: &dyn Evaluator) -> f64 {
    0.5 + Searcher::new(eval).negamax(p, depth)
}

/// NegaScout with a probability window `(alpha, beta)`. Exact when the
/// value lies inside the window, otherwise a fail-soft bound.
pub fn negascout(p: &Position, depth: u32, alpha: f64, beta: f64, eval: &dyn Evaluator) -> f64 {
    0.5 + Searcher::new(eval).negascout(p, depth, alpha - 0.5, beta - 0.5)
}

/// Same as [`negascout`] but also reports the visited node count.
pub fn negascout_counted(p: &Position, depth: u32, alpha: f64, beta: f64, eval: &dyn Evaluator) -> (f64, u64) {
    let mut s = Searcher::new(eval);
    let v = s.negascout(p, depth, alpha - 0.5, beta - 0.5);
    (0.5 + v, s.nodes)
}

/// [`negascout`] with an explicit child ordering.
pub fn negascout_ordered(p: &Position, depth: u32, alpha: f64, beta: f64, eval: &dyn Evaluator, order: MoveOrder) -> f64 {
    let mut s = Searcher::new(eval);
    s.order = order;
    0.5 + s.negascout(p, depth, alpha - 0.5, beta - 0.5)
}

/// Exact game-theoretic result for the side to move.
pub fn solve_wdl(p: &Position) -> Result<Wdl, SearchError> {
    solve_wdl_counted(p).map(|(w, _)| w)
}

pub fn solve_wdl_counted(p: &Position) -> Result<(Wdl, u64), SearchError> {
    if p.empties() > MAX_WDL_EMPTIES {
        return Err(SearchError::TooManyEmpties(p.empties()));
    }
    let mut s = Searcher::new(&crate::evaluator::ConstantEval);
    let v = s.wdl(p, -1, 1);
    Ok((wdl_of(v), s.nodes))
}

fn wdl_of(v: i8) -> Wdl {
    match v {
        1 => Wdl::Win,
        0 => Wdl::Draw,
        _ => Wdl::Loss,
    }
}

/// Iterative-deepening NegaScout from depth 1 to `limits.max_depth`, or the
/// win-draw-loss solver once empties fall to the threshold.
pub fn iterative_deepening(p: &Position, limits: &SearchLimits, eval: &dyn Evaluator) -> Result<SearchResult, SearchError> {
    search_root(p, limits, eval, None::<&mut rand::rngs::ThreadRng>)
}

/// As [`iterative_deepening`], but moves of exactly equal value are chosen
/// between by `rng` (the root move list is shuffled before ordering).
pub fn iterative_deepening_with_rng<R: Rng>(
    p: &Position,
    limits: &SearchLimits,
    eval: &dyn Evaluator,
    rng: &mut R,
) -> Result<SearchResult, SearchError> {
    search_root(p, limits, eval, Some(rng))
}

fn search_root<R: Rng>(
    p: &Position,
    limits: &SearchLimits,
    eval: &dyn Evaluator,
    rng: Option<&mut R>,
) -> Result<SearchResult, SearchError> {
    limits.validate()?;
    check_searchable(p)?;
    let mask = p.moves_mask();
    if mask == 0 {
        return pass_root(p, limits, eval);
    }

    let mut root_moves: Vec<Square> = squares(mask).collect();
    if let Some(rng) = rng {
        root_moves.shuffle(rng);
    }
    let mut searcher = Searcher::new(eval);
    searcher.budget = limits.node_budget;

    if p.empties() <= limits.wdl_empties_threshold {
        let children = order_root(p, &root_moves, None);
        let mut best: Option<(Square, i8)> = None;
        for (sq, child) in children {
            let v = -searcher.wdl(&child, -1, 1);
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((sq, v));
                if v == 1 {
                    break;
                }
            }
        }
        let (sq, v) = best.expect("at least one move");
        let label = wdl_of(v);
        return Ok(SearchResult {
            best_move: Move::Place(sq),
            score: label.value(),
            depth_reached: p.empties(),
            nodes: searcher.nodes.max(1),
            exact: Some(label),
        });
    }

    let mut result: Option<SearchResult> = None;
    for depth in 1..=limits.max_depth {
        searcher.may_abort = depth > 1;
        let first = result.map(|r| match r.best_move {
            Move::Place(sq) => sq,
            Move::Pass => unreachable!("root has flipping moves"),
        });
        let children = order_root(p, &root_moves, first);
        let mut best = f64::NEG_INFINITY;
        let mut best_sq = children[0].0;
        for (i, (sq, child)) in children.iter().enumerate() {
            let a = best.max(-1.0);
            let t = if i == 0 {
                -searcher.negascout(child, depth - 1, -1.0, -a)
            } else {
                let t = -searcher.negascout(child, depth - 1, -a.next_up(), -a);
                if t > a {
                    -searcher.negascout(child, depth - 1, -1.0, -a)
                } else {
                    t
                }
            };
            if searcher.aborted {
                break;
            }
            if t > best {
                best = t;
                best_sq = *sq;
            }
        }
        if searcher.aborted {
            break;
        }
        result = Some(SearchResult {
            best_move: Move::Place(best_sq),
            score: 0.5 + best,
            depth_reached: depth,
            nodes: searcher.nodes,
            exact: None,
        });
    }
    let mut r = result.expect("depth 1 always completes");
    r.nodes = searcher.nodes;
    Ok(r)
}

fn order_root(p: &Position, moves: &[Square], first: Option<Square>) -> Vec<(Square, Position)> {
    let mut children: Vec<(Square, Position)> = moves.iter().map(|&sq| (sq, p.play_unchecked(sq))).collect();
    children.sort_by_cached_key(|(sq, child)| move_key(*sq, child, first));
    children
}

fn pass_root(p: &Position, limits: &SearchLimits, eval: &dyn Evaluator) -> Result<SearchResult, SearchError> {
    let child = p.pass();
    let mut searcher = Searcher::new(eval);
    let (score, exact, depth) = if p.empties() <= limits.wdl_empties_threshold {
        let label = wdl_of(-searcher.wdl(&child, -1, 1));
        (label.value(), Some(label), p.empties())
    } else {
        let d = limits.max_depth - 1;
        (0.5 - searcher.negascout(&child, d, -1.0, 1.0), None, limits.max_depth)
    };
    Ok(SearchResult { best_move: Move::Pass, score, depth_reached: depth, nodes: searcher.nodes + 1, exact })
}
