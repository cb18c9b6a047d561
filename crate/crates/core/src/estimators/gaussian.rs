use crate::features::FeatureVector;
use crate::linalg::{dot, spd_factor_regularized, Matrix};

use super::{EstimatorError, LabeledExample};

/// Class-conditional Gaussian moments over the non-intercept features.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianClassStats {
    pub mu_w: Vec<f64>,
    pub mu_l: Vec<f64>,
    pub sigma_w: Matrix,
    pub sigma_l: Matrix,
    pub inv_w: Matrix,
    pub inv_l: Matrix,
    pub logdet_w: f64,
    pub logdet_l: f64,
    pub count_w: usize,
    pub count_l: usize,
    pub pooled: bool,
}

impl GaussianClassStats {
    /// Builds stats from given moments, inverting the covariances.
    pub fn from_moments(
        mu_w: Vec<f64>,
        mu_l: Vec<f64>,
        sigma_w: Matrix,
        sigma_l: Matrix,
        counts: (usize, usize),
        pooled: bool,
    ) -> Result<GaussianClassStats, EstimatorError> {
        let d = mu_w.len();
        for found in [mu_l.len(), sigma_w.rows(), sigma_l.rows()] {
            if found != d {
                return Err(EstimatorError::DimensionMismatch { expected: d, found });
            }
        }
        let fw = spd_factor_regularized(&sigma_w)?;
        let fl = if pooled { fw.clone() } else { spd_factor_regularized(&sigma_l)? };
        Ok(GaussianClassStats {
            mu_w,
            mu_l,
            inv_w: fw.inverse(),
            inv_l: fl.inverse(),
            logdet_w: fw.log_det(),
            logdet_l: fl.log_det(),
            sigma_l: if pooled { sigma_w.clone() } else { sigma_l },
            sigma_w,
            count_w: counts.0,
            count_l: counts.1,
            pooled,
        })
    }

    pub fn dim(&self) -> usize {
        self.mu_w.len()
    }

    /// Class labels exchanged.
    pub fn swapped(&self) -> GaussianClassStats {
        GaussianClassStats {
            mu_w: self.mu_l.clone(),
            mu_l: self.mu_w.clone(),
            sigma_w: self.sigma_l.clone(),
            sigma_l: self.sigma_w.clone(),
            inv_w: self.inv_l.clone(),
            inv_l: self.inv_w.clone(),
            logdet_w: self.logdet_l,
            logdet_l: self.logdet_w,
            count_w: self.count_l,
            count_l: self.count_w,
            pooled: self.pooled,
        }
    }

    fn check_dim(&self, v: &[f64]) -> Result<(), EstimatorError> {
        if v.len() != self.dim() {
            return Err(EstimatorError::DimensionMismatch { expected: self.dim() + 1, found: v.len() + 1 });
        }
        Ok(())
    }

    /// Quadratic discriminant on non-intercept values.
    pub(crate) fn qda(&self, v: &[f64]) -> f64 {
        let iw_v = self.inv_w.mul_vec(v);
        let il_v = self.inv_l.mul_vec(v);
        let quad = 0.5 * (dot(v, &iw_v) - dot(v, &il_v));
        // inverses are symmetric, so mu Sigma^-1 x' = mu . (Sigma^-1 x)
        let lin = dot(&self.mu_l, &il_v) - dot(&self.mu_w, &iw_v);
        let konst = 0.5
            * (self.inv_w.quad_form(&self.mu_w) - self.inv_l.quad_form(&self.mu_l) + self.logdet_w
                - self.logdet_l);
        -(quad + lin + konst)
    }

    /// Fisher's linear discriminant on non-intercept values.
    pub(crate) fn fisher(&self, v: &[f64]) -> f64 {
        let diff: Vec<f64> = self.mu_w.iter().zip(&self.mu_l).map(|(w, l)| w - l).collect();
        let centered: Vec<f64> =
            v.iter().zip(self.mu_w.iter().zip(&self.mu_l)).map(|(x, (w, l))| x - 0.5 * (l + w)).collect();
        dot(&diff, &self.inv_w.mul_vec(&centered))
    }
}

/// Maximum-likelihood class means and covariances (divide by class count).
///
/// Examples count as wins when `y/n > 1/2` and losses when `y/n < 1/2`;
/// drawn examples must be expanded first. The intercept is excluded. With
/// `pooled` the summed within-class scatter is divided by `|I_W| + |I_L|`.
pub fn fit_gaussian(examples: &[LabeledExample], pooled: bool) -> Result<GaussianClassStats, EstimatorError> {
    let d = match examples.first() {
        Some(e) => e.x.len() - 1,
        None => return Err(EstimatorError::InsufficientData { wins: 0, losses: 0 }),
    };
    let mut won: Vec<&[f64]> = Vec::new();
    let mut lost: Vec<&[f64]> = Vec::new();
    for e in examples {
        if e.x.len() != d + 1 {
            return Err(EstimatorError::DimensionMismatch { expected: d + 1, found: e.x.len() });
        }
        let frac = e.y / e.n as f64;
        if frac > 0.5 {
            won.push(e.x.non_intercept());
        } else if frac < 0.5 {
            lost.push(e.x.non_intercept());
        } else {
            return Err(EstimatorError::UnexpandedDraws);
        }
    }
    if won.len() < 2 || lost.len() < 2 {
        return Err(EstimatorError::InsufficientData { wins: won.len(), losses: lost.len() });
    }

    let (mu_w, scatter_w) = moments(&won, d);
    let (mu_l, scatter_l) = moments(&lost, d);
    let (cw, cl) = (won.len(), lost.len());
    if pooled {
        let mut sigma = Matrix::zeros(d, d);
        let total = (cw + cl) as f64;
        for i in 0..d {
            for j in 0..d {
                sigma[(i, j)] = (scatter_w[(i, j)] + scatter_l[(i, j)]) / total;
            }
        }
        GaussianClassStats::from_moments(mu_w, mu_l, sigma.clone(), sigma, (cw, cl), true)
    } else {
        GaussianClassStats::from_moments(
            mu_w,
            mu_l,
            scatter_w.scaled(1.0 / cw as f64),
            scatter_l.scaled(1.0 / cl as f64),
            (cw, cl),
            false,
        )
    }
}

/// Sample mean and the scatter matrix `sum (x - mu)'(x - mu)`.
fn moments(rows: &[&[f64]], d: usize) -> (Vec<f64>, Matrix) {
    let n = rows.len() as f64;
    let mut mu = vec![0.0; d];
    for r in rows {
        for (m, v) in mu.iter_mut().zip(r.iter()) {
            *m += v;
        }
    }
    mu.iter_mut().for_each(|m| *m /= n);
    let mut s = Matrix::zeros(d, d);
    let mut dev = vec![0.0; d];
    for r in rows {
        for k in 0..d {
            dev[k] = r[k] - mu[k];
        }
        for i in 0..d {
            for j in 0..=i {
                s[(i, j)] += dev[i] * dev[j];
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            s[(j, i)] = s[(i, j)];
        }
    }
    (mu, s)
}

/// Quadratic discriminant score. Equal class priors are assumed.
pub fn qda_score(stats: &GaussianClassStats, x: &FeatureVector) -> Result<f64, EstimatorError> {
    let v = x.non_intercept();
    stats.check_dim(v)?;
    Ok(stats.qda(v))
}

/// `(mu_W - mu_L) Sigma^-1 (x - (mu_L + mu_W)/2)'`.
pub fn fisher_score(stats: &GaussianClassStats, x: &FeatureVector) -> Result<f64, EstimatorError> {
    if !stats.pooled {
        return Err(EstimatorError::RequiresPooled);
    }
    let v = x.non_intercept();
    stats.check_dim(v)?;
    Ok(stats.fisher(v))
}
