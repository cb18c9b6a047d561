//! Othello evaluation-function workbench: board rules, features, three
//! statistical estimators, corpus building by label propagation, game-tree
//! search and paired tournaments.

pub mod arena;
pub mod board;
pub mod corpus;
pub mod estimators;
pub mod evaluator;
pub mod features;
pub mod linalg;
pub mod search;

pub use board::{Color, Move, Position, Square, Wdl};
pub use estimators::{ModelKind, ModelParams, PhaseTable};
pub use evaluator::Evaluator;
