//! Position features, all signed counts from the mover's point of view.

use thiserror::Error;

use crate::board::{moves_mask, neighbours, Position, CORNERS};

pub const FEATURE_VERSION: &str = "sfc-basic-1";

pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "const",
    "disc_diff",
    "mobility_diff",
    "potential_mobility_diff",
    "corner_diff",
    "x_square_diff",
    "c_square_diff",
    "frontier_diff",
    "stable_edge_diff",
    "parity",
];

pub const NUM_FEATURES: usize = 10;

/// Index of the parity feature, the one feature that is not a colour difference.
pub const PARITY: usize = 9;

/// Inclusive bounds for each feature.
pub const FEATURE_BOUNDS: [(f64, f64); NUM_FEATURES] = [
    (1.0, 1.0),
    (-64.0, 64.0),
    (-60.0, 60.0),
    (-60.0, 60.0),
    (-4.0, 4.0),
    (-4.0, 4.0),
    (-8.0, 8.0),
    (-64.0, 64.0),
    (-28.0, 28.0),
    (-1.0, 1.0),
];

// b2, g2, b7, g7
const X_SQUARES: u64 = (1 << 9) | (1 << 14) | (1 << 49) | (1 << 54);
// b1, g1, a2, h2, a7, h7, b8, g8
const C_SQUARES: u64 =
    (1 << 1) | (1 << 6) | (1 << 8) | (1 << 15) | (1 << 48) | (1 << 55) | (1 << 57) | (1 << 62);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeatureError {
    #[error("terminal positions are labeled, not evaluated")]
    TerminalPosition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    /// Wraps raw values. The first entry must be the intercept `1`.
    pub fn new(values: Vec<f64>) -> Option<FeatureVector> {
        (!values.is_empty() && values[0] == 1.0 && values.iter().all(|v| v.is_finite()))
            .then_some(FeatureVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values without the intercept.
    pub fn non_intercept(&self) -> &[f64] {
        &self.values[1..]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSetDescriptor {
    pub version: String,
    pub names: Vec<String>,
}

impl FeatureSetDescriptor {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

pub fn describe() -> FeatureSetDescriptor {
    FeatureSetDescriptor {
        version: FEATURE_VERSION.to_string(),
        names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
    }
}

pub fn extract(p: &Position) -> Result<FeatureVector, FeatureError> {
    if p.is_terminal() {
        return Err(FeatureError::TerminalPosition);
    }
    Ok(FeatureVector { values: raw_features(p).to_vec() })
}

/// Feature values for any position, terminal or not.
pub(crate) fn raw_features(p: &Position) -> [f64; NUM_FEATURES] {
    let own = p.own();
    let opp = p.opp();
    let empty = !(own | opp);
    let pop = |b: u64| b.count_ones() as f64;
    let diff = |f: &dyn Fn(u64, u64) -> u64| pop(f(own, opp)) - pop(f(opp, own));

    [
        1.0,
        pop(own) - pop(opp),
        diff(&|a, b| moves_mask(a, b)),
        // empties next to the opponent are where the mover may later play
        diff(&|_, b| neighbours(b) & empty),
        diff(&|a, _| a & CORNERS),
        diff(&|a, _| a & X_SQUARES),
        diff(&|a, _| a & C_SQUARES),
        diff(&|a, _| a & neighbours(empty)),
        diff(&|a, _| stable_edge_discs(a)),
        if p.empties() % 2 == 1 { 1.0 } else { -1.0 },
    ]
}

/// Edge discs connected to an owned corner by an unbroken run of own discs
/// along the edge.
pub fn stable_edge_discs(own: u64) -> u64 {
    // (corner, step) for the eight corner-to-edge directions
    const RUNS: [(u8, i8); 8] = [(0, 1), (0, 8), (7, -1), (7, 8), (56, 1), (56, -8), (63, -1), (63, -8)];
    let mut stable = 0;
    for (corner, step) in RUNS {
        let mut sq = corner as i8;
        for _ in 0..8 {
            let bit = 1u64 << sq;
            if own & bit == 0 {
                break;
            }
            stable |= bit;
            sq += step;
        }
    }
    stable
}
