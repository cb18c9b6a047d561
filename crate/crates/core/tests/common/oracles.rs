//! Slow, obviously-correct reference implementations.

use std::collections::HashMap;

use sfc_core::board::{Color, Position, Square, Wdl};
use sfc_core::evaluator::Evaluator;

const DIRS: [(i32, i32); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

fn at(b: u64, f: i32, r: i32) -> bool {
    (0..8).contains(&f) && (0..8).contains(&r) && b >> (r * 8 + f) & 1 == 1
}

/// Discs flipped by `own` playing `s`, by walking each of the eight rays.
pub fn naive_flips(own: u64, opp: u64, s: Square) -> u64 {
    let (f0, r0) = (s.file() as i32, s.rank() as i32);
    if at(own | opp, f0, r0) {
        return 0;
    }
    let mut total = 0;
    for (df, dr) in DIRS {
        let (mut f, mut r) = (f0 + df, r0 + dr);
        let mut run = 0u64;
        while at(opp, f, r) {
            run |= 1 << (r * 8 + f);
            f += df;
            r += dr;
        }
        if run != 0 && at(own, f, r) {
            total |= run;
        }
    }
    total
}

pub fn naive_moves(own: u64, opp: u64) -> u64 {
    (0..64u8)
        .filter(|&i| naive_flips(own, opp, Square::new(i).unwrap()) != 0)
        .fold(0, |m, i| m | 1 << i)
}

fn mover_masks(p: &Position) -> (u64, u64) {
    match p.to_move() {
        Color::Black => (p.black(), p.white()),
        Color::White => (p.white(), p.black()),
    }
}

fn from_mover(own: u64, opp: u64, mover: Color) -> Position {
    match mover {
        Color::Black => Position::from_masks(own, opp, Color::Black).unwrap(),
        Color::White => Position::from_masks(opp, own, Color::White).unwrap(),
    }
}

/// Successor positions (a single pass child when the mover is stuck),
/// empty for terminal positions.
pub fn naive_children(p: &Position) -> Vec<Position> {
    let (own, opp) = mover_masks(p);
    let mover = p.to_move();
    let moves = naive_moves(own, opp);
    if moves != 0 {
        return (0..64u8)
            .filter(|i| moves >> i & 1 == 1)
            .map(|i| {
                let s = Square::new(i).unwrap();
                let flips = naive_flips(own, opp, s);
                from_mover(opp & !flips, own | flips | s.bit(), mover.opponent())
            })
            .collect();
    }
    if naive_moves(opp, own) != 0 {
        return vec![from_mover(opp, own, mover.opponent())];
    }
    Vec::new()
}

fn mover_diff(p: &Position) -> i32 {
    let (own, opp) = mover_masks(p);
    own.count_ones() as i32 - opp.count_ones() as i32
}

/// Game-theoretic result by full-width negamax without pruning.
pub fn exhaustive_wdl(p: &Position) -> Wdl {
    let children = naive_children(p);
    if children.is_empty() {
        return Wdl::from_differential(mover_diff(p));
    }
    children.iter().map(|c| exhaustive_wdl(c).negate()).max().unwrap()
}

/// Fixed-depth negamax on the centred probability scale `v - 1/2`.
pub fn naive_negamax(p: &Position, depth: u32, eval: &dyn Evaluator) -> f64 {
    fn go(p: &Position, depth: u32, eval: &dyn Evaluator) -> f64 {
        let children = naive_children(p);
        if children.is_empty() {
            return Wdl::from_differential(mover_diff(p)).value() - 0.5;
        }
        if depth == 0 {
            return eval.probability(p) - 0.5;
        }
        children.iter().map(|c| -go(c, depth - 1, eval)).fold(f64::NEG_INFINITY, f64::max)
    }
    0.5 + go(p, depth, eval)
}

/// Replays a move list with the naive generator, passing when stuck.
pub fn naive_replay(moves: &[Square]) -> Vec<Position> {
    let mut p = Position::initial();
    let mut out = vec![p];
    for &s in moves {
        let (own, opp) = mover_masks(&p);
        if naive_moves(own, opp) == 0 {
            p = from_mover(opp, own, p.to_move().opponent());
            out.push(p);
        }
        let (own, opp) = mover_masks(&p);
        let flips = naive_flips(own, opp, s);
        assert!(flips != 0, "illegal move {s} in oracle replay");
        p = from_mover(opp & !flips, own | flips | s.bit(), p.to_move().opponent());
        out.push(p);
    }
    let (own, opp) = mover_masks(&p);
    if naive_moves(own, opp) == 0 && naive_moves(opp, own) != 0 {
        out.push(from_mover(opp, own, p.to_move().opponent()));
    }
    out
}

/// Minimax over only the edges the games traversed.
pub fn observed_minimax(games: &[Vec<Square>]) -> HashMap<Position, Wdl> {
    let mut edges: HashMap<Position, Vec<Position>> = HashMap::new();
    for g in games {
        let ps = naive_replay(g);
        for w in ps.windows(2) {
            let e = edges.entry(w[0]).or_default();
            if !e.contains(&w[1]) {
                e.push(w[1]);
            }
        }
        edges.entry(*ps.last().unwrap()).or_default();
    }
    fn value(p: &Position, edges: &HashMap<Position, Vec<Position>>, memo: &mut HashMap<Position, Wdl>) -> Wdl {
        if let Some(&v) = memo.get(p) {
            return v;
        }
        let kids = &edges[p];
        let v = if kids.is_empty() {
            Wdl::from_differential(mover_diff(p))
        } else {
            kids.iter().map(|c| value(c, edges, memo).negate()).max().unwrap()
        };
        memo.insert(*p, v);
        v
    }
    let mut memo = HashMap::new();
    for p in edges.keys() {
        value(p, &edges, &mut memo);
    }
    memo
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> =
                a[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| *v).collect()).collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * a[0][j] * cofactor_det(&minor)
        })
        .sum()
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn gauss_jordan_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, piv);
        let d = m[c][c];
        for v in m[c].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                let pivot_row = m[c].clone();
                for (v, p) in m[r].iter_mut().zip(pivot_row) {
                    *v -= f * p;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Binomial log-likelihood written directly from the definition.
pub fn direct_log_likelihood(data: &[(Vec<f64>, f64, f64)], beta: &[f64]) -> f64 {
    data.iter()
        .map(|(x, y, n)| {
            let eta: f64 = x.iter().zip(beta).map(|(a, b)| a * b).sum();
            let p = 1.0 / (1.0 + (-eta).exp());
            y * p.ln() + (n - y) * (1.0 - p).ln()
        })
        .sum()
}

/// Best log-likelihood over the grid `[-5, 5]^2` with spacing `step`.
///
/// The likelihood is concave, so the grid is scanned coarsely (spacing 0.01)
/// and then at full resolution in a window around the coarse optimum; the
/// window is widened until its maximum is interior.
pub fn grid_best_log_likelihood(data: &[(Vec<f64>, f64, f64)], step: f64) -> (f64, [f64; 2]) {
    let scan = |lo: [f64; 2], hi: [f64; 2], h: f64| {
        let nx = ((hi[0] - lo[0]) / h).round() as i64;
        let ny = ((hi[1] - lo[1]) / h).round() as i64;
        let mut best = (f64::NEG_INFINITY, [0.0, 0.0], (0, 0), (nx, ny));
        for i in 0..=nx {
            let b0 = lo[0] + i as f64 * h;
            for j in 0..=ny {
                let b1 = lo[1] + j as f64 * h;
                let ll = direct_log_likelihood(data, &[b0, b1]);
                if ll > best.0 {
                    best = (ll, [b0, b1], (i, j), (nx, ny));
                }
            }
        }
        best
    };
    let (_, coarse, _, _) = scan([-5.0, -5.0], [5.0, 5.0], 0.01);
    let mut half = 0.05;
    loop {
        let snap = |v: f64| ((v / step).round() * step).clamp(-5.0, 5.0);
        let lo = [snap(coarse[0] - half), snap(coarse[1] - half)];
        let hi = [snap(coarse[0] + half), snap(coarse[1] + half)];
        let (ll, b, (i, j), (nx, ny)) = scan(lo, hi, step);
        let on_edge = |k: i64, n: i64, l: f64, h: f64| (k == 0 && l > -5.0) || (k == n && h < 5.0);
        if !(on_edge(i, nx, lo[0], hi[0]) || on_edge(j, ny, lo[1], hi[1])) || half > 5.0 {
            return (ll, b);
        }
        half *= 2.0;
    }
}

/// Log density of N(mu, var) at x.
pub fn normal_log_density(x: f64, mu: f64, var: f64) -> f64 {
    -0.5 * ((x - mu).powi(2) / var + var.ln() + (2.0 * std::f64::consts::PI).ln())
}
