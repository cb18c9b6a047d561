//! Leaf evaluators used by search, self-play and tournaments.

use std::sync::Arc;

use crate::board::Position;
use crate::estimators::{win_probability, PhaseTable};
use crate::features::{raw_features, NUM_FEATURES};

/// Winning probability of the side to move in a non-terminal position.
pub trait Evaluator: Send + Sync {
    fn probability(&self, p: &Position) -> f64;
}

impl Evaluator for PhaseTable {
    fn probability(&self, p: &Position) -> f64 {
        let x = raw_features(p);
        win_probability(self.lookup(p.disc_count()).score_values(&x))
    }
}

impl<E: Evaluator + ?Sized> Evaluator for &E {
    fn probability(&self, p: &Position) -> f64 {
        (**self).probability(p)
    }
}

impl<E: Evaluator + ?Sized> Evaluator for Arc<E> {
    fn probability(&self, p: &Position) -> f64 {
        (**self).probability(p)
    }
}

impl<E: Evaluator + ?Sized> Evaluator for Box<E> {
    fn probability(&self, p: &Position) -> f64 {
        (**self).probability(p)
    }
}

/// Fixed hand-weighted logistic combination of the standard features, used
/// to bootstrap self-play before any model has been trained.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicEval;

impl HeuristicEval {
    pub const WEIGHTS: [f64; NUM_FEATURES] = [0.0, 0.01, 0.12, 0.04, 0.9, -0.45, -0.12, -0.04, 0.2, 0.1];
}

impl Evaluator for HeuristicEval {
    fn probability(&self, p: &Position) -> f64 {
        let x = raw_features(p);
        win_probability(x.iter().zip(Self::WEIGHTS).map(|(a, b)| a * b).sum())
    }
}

/// Wraps a closure as an evaluator.
pub struct FnEval<F>(pub F);

impl<F: Fn(&Position) -> f64 + Send + Sync> Evaluator for FnEval<F> {
    fn probability(&self, p: &Position) -> f64 {
        (self.0)(p)
    }
}

/// Evaluates every position as an even game.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantEval;

impl Evaluator for ConstantEval {
    fn probability(&self, _: &Position) -> f64 {
        0.5
    }
}
