#![allow(dead_code)]

pub mod invariants;
pub mod oracles;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sfc_core::board::{squares, Move, Position, Square};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sq(name: &str) -> Square {
    name.parse().unwrap()
}

pub fn line(moves: &str) -> Vec<Square> {
    moves.as_bytes().chunks(2).map(|c| sq(std::str::from_utf8(c).unwrap())).collect()
}

/// Every position (terminal ones included) of random games, in play order.
pub fn random_positions(seed: u64, count: usize) -> Vec<Position> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut p = Position::initial();
        out.push(p);
        while !p.is_terminal() && out.len() < count {
            let moves = p.legal_moves();
            p = p.apply_move(*moves.choose(&mut r).unwrap()).unwrap();
            out.push(p);
        }
    }
    out
}

/// Non-terminal positions with a disc count in `discs`, one per random game.
pub fn positions_with_discs(seed: u64, count: usize, discs: std::ops::RangeInclusive<u32>) -> Vec<Position> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let target = r.random_range(discs.clone());
        let mut p = Position::initial();
        while !p.is_terminal() && p.disc_count() < target {
            let moves = p.legal_moves();
            p = p.apply_move(*moves.choose(&mut r).unwrap()).unwrap();
        }
        if !p.is_terminal() && discs.contains(&p.disc_count()) {
            out.push(p);
        }
    }
    out
}

pub fn place(p: &Position, s: Square) -> Position {
    p.apply_move(Move::Place(s)).unwrap()
}

pub fn mask_of(names: &[&str]) -> u64 {
    names.iter().map(|n| sq(n).bit()).fold(0, |a, b| a | b)
}

pub fn square_list(mask: u64) -> Vec<Square> {
    squares(mask).collect()
}

/// Three short complete games sharing the prefix d3c3b3. White wins the
/// first; Black wipes out White in the other two.
pub const OVERLAPPING_GAMES: [&str; 3] = [
    "d3c3b3e3f5a3c4e6f4g4 -14",
    "d3c3b3b2b1d2f5f4d1e3f3 +15",
    "d3c3b3b2b1d2f6f5d1c2g6 +15",
];
