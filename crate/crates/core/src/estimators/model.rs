//! Fitted models behind one interface, and their text file format.
//!
//! ```text
//! SFC1 <QDA|FISHER|LOGIT> <feature_version> <n> <bucket_lo> <bucket_hi>
//! <one decimal value per line, 17 significant digits>
//! ```
//!
//! Logistic files hold the `n` coefficients. Gaussian files hold, with
//! `d = n - 1`: `mu_W`, `mu_L`, `Sigma_W`, `Sigma_L`, `Sigma_W^-1`,
//! `Sigma_L^-1` (row-major), `log|Sigma_W|`, `log|Sigma_L|`, the two class
//! counts and the pooled flag.

use std::fs;
use std::path::{Path, PathBuf};

use crate::board::Position;
use crate::features::{self, FEATURE_VERSION, NUM_FEATURES};
use crate::linalg::Matrix;

use super::{win_probability, EstimatorError, GaussianClassStats, LogisticModel, ModelKind};

const MAGIC: &str = "SFC1";

/// Inclusive disc-count range a model was fitted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseRange {
    pub lo: u32,
    pub hi: u32,
}

impl PhaseRange {
    pub const ALL: PhaseRange = PhaseRange { lo: 4, hi: 64 };

    pub fn contains(&self, discs: u32) -> bool {
        self.lo <= discs && discs <= self.hi
    }

    fn distance(&self, discs: u32) -> u32 {
        if discs < self.lo {
            self.lo - discs
        } else {
            discs.saturating_sub(self.hi)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelPayload {
    Gaussian(GaussianClassStats),
    Logistic(LogisticModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    kind: ModelKind,
    payload: ModelPayload,
    feature_version: String,
    phase: PhaseRange,
}

impl ModelParams {
    pub fn qda(stats: GaussianClassStats, phase: PhaseRange) -> ModelParams {
        ModelParams {
            kind: ModelKind::Qda,
            payload: ModelPayload::Gaussian(stats),
            feature_version: FEATURE_VERSION.to_string(),
            phase,
        }
    }

    pub fn fisher(stats: GaussianClassStats, phase: PhaseRange) -> Result<ModelParams, EstimatorError> {
        if !stats.pooled {
            return Err(EstimatorError::RequiresPooled);
        }
        Ok(ModelParams {
            kind: ModelKind::Fisher,
            payload: ModelPayload::Gaussian(stats),
            feature_version: FEATURE_VERSION.to_string(),
            phase,
        })
    }

    pub fn logistic(model: LogisticModel, phase: PhaseRange) -> ModelParams {
        ModelParams {
            kind: ModelKind::Logistic,
            payload: ModelPayload::Logistic(model),
            feature_version: FEATURE_VERSION.to_string(),
            phase,
        }
    }

    pub fn with_feature_version(mut self, version: impl Into<String>) -> ModelParams {
        self.feature_version = version.into();
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn payload(&self) -> &ModelPayload {
        &self.payload
    }

    pub fn feature_version(&self) -> &str {
        &self.feature_version
    }

    pub fn phase(&self) -> PhaseRange {
        self.phase
    }

    /// Feature count including the intercept.
    pub fn num_features(&self) -> usize {
        match &self.payload {
            ModelPayload::Gaussian(s) => s.dim() + 1,
            ModelPayload::Logistic(m) => m.beta.len(),
        }
    }

    fn check_version(&self) -> Result<(), EstimatorError> {
        if self.feature_version != FEATURE_VERSION {
            return Err(EstimatorError::FeatureVersionMismatch {
                model: self.feature_version.clone(),
                extractor: FEATURE_VERSION.to_string(),
            });
        }
        Ok(())
    }

    /// Score on a full feature vector (intercept first); no checks.
    #[inline]
    pub(crate) fn score_values(&self, x: &[f64]) -> f64 {
        match (&self.payload, self.kind) {
            (ModelPayload::Logistic(m), _) => m.score(x),
            (ModelPayload::Gaussian(s), ModelKind::Fisher) => s.fisher(&x[1..]),
            (ModelPayload::Gaussian(s), _) => s.qda(&x[1..]),
        }
    }

    pub fn score(&self, x: &features::FeatureVector) -> Result<f64, EstimatorError> {
        if x.len() != self.num_features() {
            return Err(EstimatorError::DimensionMismatch { expected: self.num_features(), found: x.len() });
        }
        Ok(self.score_values(x.values()))
    }

    /// Winning probability of the side to move.
    pub fn evaluate(&self, p: &Position) -> Result<f64, EstimatorError> {
        self.check_version()?;
        let x = features::extract(p).map_err(|_| EstimatorError::TerminalPosition)?;
        Ok(win_probability(self.score(&x)?))
    }

    pub fn to_text(&self) -> String {
        let n = self.num_features();
        let mut out = format!(
            "{MAGIC} {} {} {n} {} {}\n",
            self.kind.tag(),
            self.feature_version,
            self.phase.lo,
            self.phase.hi
        );
        let mut push = |v: f64| {
            out.push_str(&format!("{v:.16e}\n"));
        };
        match &self.payload {
            ModelPayload::Logistic(m) => m.beta.iter().copied().for_each(&mut push),
            ModelPayload::Gaussian(s) => {
                s.mu_w.iter().chain(&s.mu_l).copied().for_each(&mut push);
                for m in [&s.sigma_w, &s.sigma_l, &s.inv_w, &s.inv_l] {
                    m.as_slice().iter().copied().for_each(&mut push);
                }
                push(s.logdet_w);
                push(s.logdet_l);
                push(s.count_w as f64);
                push(s.count_l as f64);
                push(if s.pooled { 1.0 } else { 0.0 });
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<ModelParams, EstimatorError> {
        let fmt_err = |m: String| EstimatorError::Format(m);
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| fmt_err("empty file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 6 || fields[0] != MAGIC {
            return Err(fmt_err(format!("bad header {header:?}")));
        }
        let kind = match fields[1] {
            "QDA" => ModelKind::Qda,
            "FISHER" => ModelKind::Fisher,
            "LOGIT" => ModelKind::Logistic,
            other => return Err(fmt_err(format!("unknown model kind {other:?}"))),
        };
        let version = fields[2].to_string();
        let parse_u = |s: &str, what: &str| s.parse::<u32>().map_err(|_| fmt_err(format!("bad {what} {s:?}")));
        let n = parse_u(fields[3], "feature count")? as usize;
        let phase = PhaseRange { lo: parse_u(fields[4], "bucket_lo")?, hi: parse_u(fields[5], "bucket_hi")? };
        if n < 2 {
            return Err(fmt_err(format!("feature count {n} below 2")));
        }
        if version == FEATURE_VERSION && n != NUM_FEATURES {
            return Err(fmt_err(format!("feature count {n} does not match {version} ({NUM_FEATURES})")));
        }
        if phase.lo > phase.hi {
            return Err(fmt_err(format!("empty bucket {}..{}", phase.lo, phase.hi)));
        }

        let values = lines
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.parse::<f64>().map_err(|_| fmt_err(format!("bad value {l:?}"))))
            .collect::<Result<Vec<f64>, _>>()?;

        let d = n - 1;
        let expected = match kind {
            ModelKind::Logistic => n,
            _ => 2 * d + 4 * d * d + 5,
        };
        if values.len() != expected {
            return Err(fmt_err(format!(
                "feature count {n} needs {expected} values for {}, found {}",
                kind.tag(),
                values.len()
            )));
        }

        let payload = match kind {
            ModelKind::Logistic => ModelPayload::Logistic(LogisticModel::from_coefficients(values)),
            _ => {
                let mut rest = values.as_slice();
                let mut take = |k: usize| {
                    let (head, tail) = rest.split_at(k);
                    rest = tail;
                    head.to_vec()
                };
                let mu_w = take(d);
                let mu_l = take(d);
                let mut mats = Vec::with_capacity(4);
                for _ in 0..4 {
                    mats.push(Matrix::from_row_major(d, d, take(d * d))?);
                }
                let tail = take(5);
                let [sigma_w, sigma_l, inv_w, inv_l]: [Matrix; 4] = mats.try_into().expect("four matrices");
                let count = |v: f64| {
                    if v >= 0.0 && v.fract() == 0.0 {
                        Ok(v as usize)
                    } else {
                        Err(fmt_err(format!("bad class count {v}")))
                    }
                };
                let pooled = match tail[4] {
                    0.0 => false,
                    1.0 => true,
                    v => return Err(fmt_err(format!("bad pooled flag {v}"))),
                };
                if kind == ModelKind::Fisher && !pooled {
                    return Err(fmt_err("FISHER model with unpooled covariances".into()));
                }
                ModelPayload::Gaussian(GaussianClassStats {
                    mu_w,
                    mu_l,
                    sigma_w,
                    sigma_l,
                    inv_w,
                    inv_l,
                    logdet_w: tail[0],
                    logdet_l: tail[1],
                    count_w: count(tail[2])?,
                    count_l: count(tail[3])?,
                    pooled,
                })
            }
        };
        Ok(ModelParams { kind, payload, feature_version: version, phase })
    }

    /// File name used inside a model directory, e.g. `logit_16_19.sfc`.
    pub fn file_name(&self) -> String {
        format!("{}_{:02}_{:02}.sfc", self.kind.name(), self.phase.lo, self.phase.hi)
    }
}

pub fn save_model(model: &ModelParams, path: impl AsRef<Path>) -> Result<(), EstimatorError> {
    fs::write(path, model.to_text())?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelParams, EstimatorError> {
    ModelParams::from_text(&fs::read_to_string(path)?)
}

/// Per-phase models: a position is evaluated by the model whose bucket
/// contains its disc count, or the nearest bucket when none does.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTable {
    models: Vec<ModelParams>,
}

impl PhaseTable {
    pub fn new(mut models: Vec<ModelParams>) -> Result<PhaseTable, EstimatorError> {
        if models.is_empty() {
            return Err(EstimatorError::Empty);
        }
        for m in &models {
            m.check_version()?;
            if m.num_features() != NUM_FEATURES {
                return Err(EstimatorError::DimensionMismatch { expected: NUM_FEATURES, found: m.num_features() });
            }
        }
        models.sort_by_key(|m| m.phase);
        for pair in models.windows(2) {
            if pair[1].phase.lo <= pair[0].phase.hi {
                return Err(EstimatorError::Format(format!(
                    "overlapping buckets {}..{} and {}..{}",
                    pair[0].phase.lo, pair[0].phase.hi, pair[1].phase.lo, pair[1].phase.hi
                )));
            }
        }
        Ok(PhaseTable { models })
    }

    pub fn single(model: ModelParams) -> Result<PhaseTable, EstimatorError> {
        PhaseTable::new(vec![model])
    }

    pub fn models(&self) -> &[ModelParams] {
        &self.models
    }

    pub fn lookup(&self, discs: u32) -> &ModelParams {
        self.models
            .iter()
            .min_by_key(|m| m.phase.distance(discs))
            .expect("phase table is never empty")
    }

    pub fn evaluate(&self, p: &Position) -> Result<f64, EstimatorError> {
        self.lookup(p.disc_count()).evaluate(p)
    }

    /// Writes one model file per bucket into `dir`, returning the paths.
    pub fn save_dir(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, EstimatorError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        self.models
            .iter()
            .map(|m| {
                let path = dir.join(m.file_name());
                save_model(m, &path)?;
                Ok(path)
            })
            .collect()
    }

    /// Loads every `*.sfc` file in `dir`.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<PhaseTable, EstimatorError> {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "sfc"))
            .collect();
        paths.sort();
        PhaseTable::new(paths.iter().map(load_model).collect::<Result<_, _>>()?)
    }
}
