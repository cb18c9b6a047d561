//! The three winning-probability models: quadratic discriminant, Fisher's
//! linear discriminant, and logistic regression.
//!
//! Each maps a feature vector to a real score `f(x)`; the winning
//! probability is always `1 / (1 + exp(-f(x)))`.

mod gaussian;
mod logistic;
mod model;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::board::Wdl;
use crate::features::FeatureVector;
use crate::linalg::LinalgError;

pub use gaussian::{fisher_score, fit_gaussian, qda_score, GaussianClassStats};
pub use logistic::{
    fit_logistic, log_likelihood, FitSummary, IrlsWorkspace, LogisticFitter, LogisticModel,
    DEFAULT_MAX_ITER, DEFAULT_TOL,
};
pub use model::{load_model, save_model, ModelParams, ModelPayload, PhaseRange, PhaseTable};

/// Trials assigned to boundary observations so the likelihood maximum exists.
pub const CLAMP_TRIALS: u32 = 100;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("need at least 2 won and 2 lost examples, have {wins} won and {losses} lost")]
    InsufficientData { wins: usize, losses: usize },
    #[error("drawn examples must be expanded before Gaussian fitting")]
    UnexpandedDraws,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("feature version mismatch: model has {model:?}, extractor has {extractor:?}")]
    FeatureVersionMismatch { model: String, extractor: String },
    #[error("feature dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Fisher's discriminant requires pooled covariances")]
    RequiresPooled,
    #[error("logit is undefined at {0}")]
    DomainError(f64),
    #[error("log-likelihood decreased after full step damping at iteration {iteration}")]
    Diverged { iteration: usize },
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("no examples to fit")]
    Empty,
    #[error("terminal positions are labeled, not evaluated")]
    TerminalPosition,
    #[error("model file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Qda,
    Fisher,
    Logistic,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Qda, ModelKind::Fisher, ModelKind::Logistic];

    /// Tag used in model file headers.
    pub const fn tag(self) -> &'static str {
        match self {
            ModelKind::Qda => "QDA",
            ModelKind::Fisher => "FISHER",
            ModelKind::Logistic => "LOGIT",
        }
    }

    /// Lower-case name used on the command line and in file names.
    pub const fn name(self) -> &'static str {
        match self {
            ModelKind::Qda => "qda",
            ModelKind::Fisher => "fisher",
            ModelKind::Logistic => "logit",
        }
    }

    pub const fn is_gaussian(self) -> bool {
        !matches!(self, ModelKind::Logistic)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qda" | "quad" => Ok(ModelKind::Qda),
            "fisher" => Ok(ModelKind::Fisher),
            "logit" | "log" | "logistic" => Ok(ModelKind::Logistic),
            _ => Err(format!("unknown model kind {s:?} (expected logit, fisher or qda)")),
        }
    }
}

/// One observation of the generalized binomial model: `y` successes out of
/// `n` trials at feature vector `x`, taken at a position with `discs` discs.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub x: FeatureVector,
    pub y: f64,
    pub n: u32,
    pub discs: u32,
}

impl LabeledExample {
    pub fn new(x: FeatureVector, label: Wdl, discs: u32) -> LabeledExample {
        let y = label.value();
        LabeledExample { x, y, n: 1, discs }
    }

    /// Win for `y = n`, loss for `y = 0`, draw for `y = n/2`; `None` for any
    /// other (already clamped) observation.
    pub fn label(&self) -> Option<Wdl> {
        let n = self.n as f64;
        if self.y == n {
            Some(Wdl::Win)
        } else if self.y == 0.0 {
            Some(Wdl::Loss)
        } else if 2.0 * self.y == n {
            Some(Wdl::Draw)
        } else {
            None
        }
    }

    pub fn is_draw(&self) -> bool {
        self.label() == Some(Wdl::Draw)
    }
}

/// Logistic function, computed without overflow for any finite score.
#[inline]
pub fn win_probability(score: f64) -> f64 {
    if score >= 0.0 {
        1.0 / (1.0 + (-score).exp())
    } else {
        let e = score.exp();
        e / (1.0 + e)
    }
}

pub fn logit(t: f64) -> Result<f64, EstimatorError> {
    if t > 0.0 && t < 1.0 {
        Ok((t / (1.0 - t)).ln())
    } else {
        Err(EstimatorError::DomainError(t))
    }
}

/// Replaces `y = 0` and `y = n` observations by `1/100` and `99/100`.
pub fn clamp_boundary_labels(examples: Vec<LabeledExample>) -> Vec<LabeledExample> {
    examples
        .into_iter()
        .map(|mut e| {
            if e.y == 0.0 {
                e.n = CLAMP_TRIALS;
                e.y = 1.0;
            } else if e.y == e.n as f64 {
                e.n = CLAMP_TRIALS;
                e.y = (CLAMP_TRIALS - 1) as f64;
            }
            e
        })
        .collect()
}
