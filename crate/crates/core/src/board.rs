//! Othello rules on a pair of 64-bit occupancy masks.
//!
//! Squares are indexed `a1 = 0 … h8 = 63`, row-major from rank 1, so
//! `index = rank * 8 + file`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

const NOT_A_FILE: u64 = !0x0101_0101_0101_0101;
const NOT_H_FILE: u64 = !0x8080_8080_8080_8080;

pub const CORNERS: u64 = (1 << 0) | (1 << 7) | (1 << 56) | (1 << 63);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoardError {
    #[error("illegal move {0}")]
    IllegalMove(Move),
    #[error("invalid square name {0:?}")]
    BadSquare(String),
    #[error("invalid position: {0}")]
    InvalidPosition(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Black,
    White,
}

impl Color {
    #[inline]
    pub const fn opponent(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

/// A board coordinate in `0..64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Square(u8);

impl Square {
    pub fn new(index: u8) -> Option<Square> {
        (index < 64).then_some(Square(index))
    }

    pub const fn from_file_rank(file: u8, rank: u8) -> Square {
        Square(rank * 8 + file)
    }

    #[inline]
    pub const fn index(self) -> u8 {
        self.0
    }

    #[inline]
    pub const fn file(self) -> u8 {
        self.0 % 8
    }

    #[inline]
    pub const fn rank(self) -> u8 {
        self.0 / 8
    }

    #[inline]
    pub const fn bit(self) -> u64 {
        1u64 << self.0
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'a' + self.file()) as char, (b'1' + self.rank()) as char)
    }
}

impl FromStr for Square {
    type Err = BoardError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let b = s.as_bytes();
        if b.len() != 2 {
            return Err(BoardError::BadSquare(s.to_string()));
        }
        let file = b[0].to_ascii_lowercase().wrapping_sub(b'a');
        let rank = b[1].wrapping_sub(b'1');
        if file < 8 && rank < 8 {
            Ok(Square::from_file_rank(file, rank))
        } else {
            Err(BoardError::BadSquare(s.to_string()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Place(Square),
    Pass,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Place(sq) => sq.fmt(f),
            Move::Pass => f.write_str("pass"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wdl {
    Loss,
    Draw,
    Win,
}

impl Wdl {
    pub const fn negate(self) -> Wdl {
        match self {
            Wdl::Win => Wdl::Loss,
            Wdl::Draw => Wdl::Draw,
            Wdl::Loss => Wdl::Win,
        }
    }

    pub fn from_differential(diff: i32) -> Wdl {
        match diff.signum() {
            1 => Wdl::Win,
            0 => Wdl::Draw,
            _ => Wdl::Loss,
        }
    }

    /// Probability-scale value: 1, ½ or 0.
    pub const fn value(self) -> f64 {
        match self {
            Wdl::Win => 1.0,
            Wdl::Draw => 0.5,
            Wdl::Loss => 0.0,
        }
    }
}

/// Game result from the perspective of the side to move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub label: Wdl,
    pub disc_differential: Option<i32>,
}

impl Outcome {
    pub fn from_differential(diff: i32) -> Outcome {
        Outcome { label: Wdl::from_differential(diff), disc_differential: Some(diff) }
    }
}

#[inline]
fn shift(b: u64, dir: usize) -> u64 {
    match dir {
        0 => (b << 1) & NOT_A_FILE,
        1 => (b >> 1) & NOT_H_FILE,
        2 => b << 8,
        3 => b >> 8,
        4 => (b << 9) & NOT_A_FILE,
        5 => (b << 7) & NOT_H_FILE,
        6 => (b >> 7) & NOT_A_FILE,
        _ => (b >> 9) & NOT_H_FILE,
    }
}

/// Squares where `own` may place a disc that brackets at least one `opp` disc.
pub fn moves_mask(own: u64, opp: u64) -> u64 {
    let empty = !(own | opp);
    let mut moves = 0;
    for dir in 0..8 {
        let mut run = shift(own, dir) & opp;
        for _ in 0..5 {
            run |= shift(run, dir) & opp;
        }
        moves |= shift(run, dir) & empty;
    }
    moves
}

/// Discs flipped when `own` plays on `sq`. Zero if the placement flips nothing.
pub fn flips(own: u64, opp: u64, sq: Square) -> u64 {
    let start = sq.bit();
    let mut flipped = 0;
    for dir in 0..8 {
        let mut run = 0;
        let mut x = shift(start, dir);
        while x & opp != 0 {
            run |= x;
            x = shift(x, dir);
        }
        if x & own != 0 {
            flipped |= run;
        }
    }
    flipped
}

/// Mask of squares 8-adjacent to any square of `b`.
pub fn neighbours(b: u64) -> u64 {
    (0..8).fold(0, |acc, dir| acc | shift(b, dir))
}

pub fn squares(mut bits: u64) -> impl Iterator<Item = Square> {
    std::iter::from_fn(move || {
        if bits == 0 {
            None
        } else {
            let idx = bits.trailing_zeros() as u8;
            bits &= bits - 1;
            Some(Square(idx))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    black: u64,
    white: u64,
    to_move: Color,
}

impl Default for Position {
    fn default() -> Self {
        Self::initial()
    }
}

impl Position {
    /// Standard start: White on d4 and e5, Black on d5 and e4, Black to move.
    pub const fn initial() -> Position {
        let d4 = 1u64 << 27;
        let e4 = 1u64 << 28;
        let d5 = 1u64 << 35;
        let e5 = 1u64 << 36;
        Position { black: d5 | e4, white: d4 | e5, to_move: Color::Black }
    }

    pub fn from_masks(black: u64, white: u64, to_move: Color) -> Result<Position, BoardError> {
        if black & white != 0 {
            return Err(BoardError::InvalidPosition("square occupied by both colours"));
        }
        let n = (black | white).count_ones();
        if n < 4 {
            return Err(BoardError::InvalidPosition("fewer than four discs"));
        }
        Ok(Position { black, white, to_move })
    }

    #[inline]
    pub const fn black(&self) -> u64 {
        self.black
    }

    #[inline]
    pub const fn white(&self) -> u64 {
        self.white
    }

    #[inline]
    pub const fn to_move(&self) -> Color {
        self.to_move
    }

    /// Discs of the side to move.
    #[inline]
    pub const fn own(&self) -> u64 {
        match self.to_move {
            Color::Black => self.black,
            Color::White => self.white,
        }
    }

    #[inline]
    pub const fn opp(&self) -> u64 {
        match self.to_move {
            Color::Black => self.white,
            Color::White => self.black,
        }
    }

    #[inline]
    pub const fn occupied(&self) -> u64 {
        self.black | self.white
    }

    #[inline]
    pub const fn empties(&self) -> u32 {
        64 - self.occupied().count_ones()
    }

    #[inline]
    pub const fn disc_count(&self) -> u32 {
        self.occupied().count_ones()
    }

    #[inline]
    pub fn moves_mask(&self) -> u64 {
        moves_mask(self.own(), self.opp())
    }

    /// The same occupancy with the other side to move.
    pub const fn with_mover_toggled(&self) -> Position {
        Position { black: self.black, white: self.white, to_move: self.to_move.opponent() }
    }

    /// Colours exchanged on every square and the mover toggled, so the
    /// discs keep their relation to the side to move.
    pub const fn colour_swapped(&self) -> Position {
        Position { black: self.white, white: self.black, to_move: self.to_move.opponent() }
    }

    /// Flipping moves if any exist; `[Pass]` if only the opponent can move;
    /// empty when the game is over.
    pub fn legal_moves(&self) -> Vec<Move> {
        let mask = self.moves_mask();
        if mask != 0 {
            squares(mask).map(Move::Place).collect()
        } else if moves_mask(self.opp(), self.own()) != 0 {
            vec![Move::Pass]
        } else {
            Vec::new()
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.moves_mask() == 0 && moves_mask(self.opp(), self.own()) == 0
    }

    /// True when the mover has no flipping move but the opponent does.
    pub fn must_pass(&self) -> bool {
        self.moves_mask() == 0 && moves_mask(self.opp(), self.own()) != 0
    }

    pub fn apply_move(&self, mv: Move) -> Result<Position, BoardError> {
        match mv {
            Move::Pass if self.must_pass() => Ok(self.pass()),
            Move::Place(sq) if self.moves_mask() & sq.bit() != 0 => Ok(self.play_unchecked(sq)),
            _ => Err(BoardError::IllegalMove(mv)),
        }
    }

    #[inline]
    pub(crate) const fn pass(&self) -> Position {
        self.with_mover_toggled()
    }

    /// Places a disc for the mover without checking legality.
    #[inline]
    pub(crate) fn play_unchecked(&self, sq: Square) -> Position {
        let own = self.own();
        let opp = self.opp();
        let f = flips(own, opp, sq);
        let new_own = own | f | sq.bit();
        let new_opp = opp & !f;
        match self.to_move {
            Color::Black => Position { black: new_own, white: new_opp, to_move: Color::White },
            Color::White => Position { black: new_opp, white: new_own, to_move: Color::Black },
        }
    }

    pub fn terminal_outcome(&self) -> Option<Outcome> {
        if !self.is_terminal() {
            return None;
        }
        let diff = self.own().count_ones() as i32 - self.opp().count_ones() as i32;
        Some(Outcome::from_differential(diff))
    }

    /// Black's discs minus White's.
    pub fn black_differential(&self) -> i32 {
        self.black.count_ones() as i32 - self.white.count_ones() as i32
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rank in (0..8).rev() {
            for file in 0..8 {
                let bit = Square::from_file_rank(file, rank).bit();
                let c = if self.black & bit != 0 {
                    'X'
                } else if self.white & bit != 0 {
                    'O'
                } else {
                    '-'
                };
                write!(f, "{c}")?;
            }
            writeln!(f)?;
        }
        write!(f, "{:?} to move", self.to_move)
    }
}

/// Replays non-pass moves from the start, inserting forced passes.
pub fn replay<I: IntoIterator<Item = Square>>(moves: I) -> Result<Position, BoardError> {
    let mut pos = Position::initial();
    for sq in moves {
        if pos.must_pass() {
            pos = pos.pass();
        }
        pos = pos.apply_move(Move::Place(sq))?;
    }
    Ok(pos)
}
