//! Logistic regression fitted by Newton–Raphson in its iteratively
//! reweighted least-squares form.

use crate::linalg::{dot, weighted_normal_solve, weighted_normal_solve_regularized, LinalgError, Matrix};

use super::{win_probability, EstimatorError, LabeledExample};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 50;

const MAX_HALVINGS: usize = 20;
// keeps every fitted probability strictly inside (0, 1)
const PI_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct FitSummary {
    /// Weighted least-squares solves performed.
    pub iterations: usize,
    pub final_log_likelihood: f64,
    /// Log-likelihood after each accepted iteration.
    pub log_likelihood_trace: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    /// `beta[0]` multiplies the intercept feature.
    pub beta: Vec<f64>,
    /// Present for freshly fitted models; model files store coefficients only.
    pub fit: Option<FitSummary>,
}

impl LogisticModel {
    pub fn from_coefficients(beta: Vec<f64>) -> LogisticModel {
        LogisticModel { beta, fit: None }
    }

    #[inline]
    pub fn score(&self, x: &[f64]) -> f64 {
        dot(&self.beta, x)
    }
}

/// Per-iteration state of the fit.
#[derive(Debug, Clone)]
pub struct IrlsWorkspace {
    pub pi: Vec<f64>,
    pub delta: Vec<f64>,
    pub z: Vec<f64>,
    pub log_likelihood: Vec<f64>,
}

impl IrlsWorkspace {
    fn new(n: usize) -> IrlsWorkspace {
        IrlsWorkspace { pi: vec![0.0; n], delta: vec![0.0; n], z: vec![0.0; n], log_likelihood: Vec::new() }
    }

    /// Recomputes weights and working response from `pi`.
    fn reweight(&mut self, eta: &[f64], examples: &[LabeledExample]) {
        for (i, e) in examples.iter().enumerate() {
            let p = self.pi[i];
            let n = e.n as f64;
            let w = n * p * (1.0 - p);
            self.delta[i] = w;
            self.z[i] = eta[i] + (e.y - n * p) / w;
        }
    }
}

#[inline]
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// `sum y_i log pi_i + (n_i - y_i) log(1 - pi_i)` with `pi_i = sigmoid(x_i beta)`.
pub fn log_likelihood(examples: &[LabeledExample], beta: &[f64]) -> f64 {
    examples
        .iter()
        .map(|e| {
            let eta = dot(e.x.values(), beta);
            e.y * eta - e.n as f64 * softplus(eta)
        })
        .sum()
}

#[derive(Debug, Clone, Copy)]
pub struct LogisticFitter {
    pub tol: f64,
    pub max_iter: usize,
    /// Retry singular normal equations with a small ridge instead of
    /// failing with `RankDeficient`. Needed when a feature is constant
    /// within a training bucket.
    pub regularize: bool,
}

impl Default for LogisticFitter {
    fn default() -> Self {
        LogisticFitter { tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER, regularize: false }
    }
}

impl LogisticFitter {
    pub fn new(tol: f64, max_iter: usize) -> LogisticFitter {
        LogisticFitter { tol, max_iter, regularize: false }
    }

    pub fn regularized(mut self, on: bool) -> LogisticFitter {
        self.regularize = on;
        self
    }

    /// Starting probabilities `(y_i + 1/2) / (n_i + 1)`.
    pub fn start_probabilities(examples: &[LabeledExample]) -> Vec<f64> {
        examples.iter().map(|e| (e.y + 0.5) / (e.n as f64 + 1.0)).collect()
    }

    pub fn fit(&self, examples: &[LabeledExample]) -> Result<LogisticModel, EstimatorError> {
        self.fit_from(examples, &Self::start_probabilities(examples))
    }

    /// Fits starting from the given fitted probabilities instead of the
    /// default start.
    pub fn fit_from(&self, examples: &[LabeledExample], start_pi: &[f64]) -> Result<LogisticModel, EstimatorError> {
        let first = examples.first().ok_or(EstimatorError::Empty)?;
        let p = first.x.len();
        if start_pi.len() != examples.len() {
            return Err(EstimatorError::DimensionMismatch { expected: examples.len(), found: start_pi.len() });
        }
        let mut rows = Vec::with_capacity(examples.len() * p);
        for e in examples {
            if e.x.len() != p {
                return Err(EstimatorError::DimensionMismatch { expected: p, found: e.x.len() });
            }
            rows.extend_from_slice(e.x.values());
        }
        let x = Matrix::from_row_major(examples.len(), p, rows)?;

        let mut ws = IrlsWorkspace::new(examples.len());
        for (dst, &src) in ws.pi.iter_mut().zip(start_pi) {
            *dst = src.clamp(PI_FLOOR, 1.0 - PI_FLOOR);
        }
        let mut eta: Vec<f64> = ws.pi.iter().map(|&p| (p / (1.0 - p)).ln()).collect();

        let mut beta: Option<Vec<f64>> = None;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < self.max_iter {
            iterations += 1;
            ws.reweight(&eta, examples);
            let solved = if self.regularize {
                weighted_normal_solve_regularized(&x, &ws.delta, &ws.z)
            } else {
                weighted_normal_solve(&x, &ws.delta, &ws.z)
            };
            let mut candidate = solved.map_err(|e| match e {
                LinalgError::NotPositiveDefinite { .. } => EstimatorError::RankDeficient,
                other => EstimatorError::Linalg(other),
            })?;
            let mut ll = log_likelihood(examples, &candidate);

            if let Some(old) = &beta {
                let old_ll = *ws.log_likelihood.last().expect("trace follows beta");
                let slack = 1e-12 * old_ll.abs().max(1.0);
                let mut halvings = 0;
                while !(ll >= old_ll - slack) {
                    if max_abs_diff(&candidate, old) < self.tol {
                        // step already negligible: the previous iterate is the optimum
                        candidate = old.clone();
                        ll = old_ll;
                        break;
                    }
                    if halvings == MAX_HALVINGS {
                        return Err(EstimatorError::Diverged { iteration: iterations });
                    }
                    for (c, o) in candidate.iter_mut().zip(old) {
                        *c = 0.5 * (*c + o);
                    }
                    ll = log_likelihood(examples, &candidate);
                    halvings += 1;
                }
                converged = max_abs_diff(&candidate, old) < self.tol;
            }
            if !ll.is_finite() || candidate.iter().any(|b| !b.is_finite()) {
                return Err(EstimatorError::Diverged { iteration: iterations });
            }

            ws.log_likelihood.push(ll);
            for (i, e) in examples.iter().enumerate() {
                eta[i] = dot(e.x.values(), &candidate);
                ws.pi[i] = win_probability(eta[i]).clamp(PI_FLOOR, 1.0 - PI_FLOOR);
            }
            beta = Some(candidate);
            if converged {
                break;
            }
        }

        let beta = beta.expect("max_iter >= 1");
        Ok(LogisticModel {
            beta,
            fit: Some(FitSummary {
                iterations,
                final_log_likelihood: *ws.log_likelihood.last().expect("at least one iteration"),
                log_likelihood_trace: ws.log_likelihood,
                converged,
            }),
        })
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Maximum-likelihood logistic fit with the default strict fitter.
pub fn fit_logistic(examples: &[LabeledExample], tol: f64, max_iter: usize) -> Result<LogisticModel, EstimatorError> {
    LogisticFitter::new(tol, max_iter.max(1)).fit(examples)
}
