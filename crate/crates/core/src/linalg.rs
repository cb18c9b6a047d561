//! Dense symmetric linear algebra for the estimators.
//!
//! Dimensions are small (a dozen features), so everything is plain row-major
//! `Vec<f64>` with a hand-written Cholesky factorization.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not positive definite (ridge {ridge:e})")]
    NotPositiveDefinite { ridge: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Matrix {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scaled(&self, c: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * c).collect() }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `v' A v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        dot(v, &self.mul_vec(v))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cholesky factor of `A + ridge * I`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdFactorization {
    n: usize,
    lower: Vec<f64>,
    ridge: f64,
}

impl SpdFactorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    #[inline]
    pub fn l(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.n + j]
    }

    pub fn lower(&self) -> Matrix {
        Matrix { rows: self.n, cols: self.n, data: self.lower.clone() }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let n = self.n;
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, found: b.len() });
        }
        let mut y = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|k| self.l(i, k) * y[k]).sum();
            y[i] = (y[i] - s) / self.l(i, i);
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.l(k, i) * y[k]).sum();
            y[i] = (y[i] - s) / self.l(i, i);
        }
        Ok(y)
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.n).map(|i| self.l(i, i).ln()).sum::<f64>()
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.n;
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e).expect("dimension checked");
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        // symmetrize away round-off
        for i in 0..n {
            for j in 0..i {
                let m = 0.5 * (inv[(i, j)] + inv[(j, i)]);
                inv[(i, j)] = m;
                inv[(j, i)] = m;
            }
        }
        inv
    }
}

/// Factorizes `A + ridge * I`. Only the lower triangle of `A` is read.
pub fn spd_factor(a: &Matrix, ridge: f64) -> Result<SpdFactorization, LinalgError> {
    if a.rows != a.cols {
        return Err(LinalgError::DimensionMismatch { expected: a.rows, found: a.cols });
    }
    let n = a.rows;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[(j, j)] + ridge;
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(LinalgError::NotPositiveDefinite { ridge });
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    Ok(SpdFactorization { n, lower: l, ridge })
}

/// Factorizes `A`; on failure retries once with `1e-8 * tr(A)/n` and once
/// more with `1e-4 * tr(A)/n`.
pub fn spd_factor_regularized(a: &Matrix) -> Result<SpdFactorization, LinalgError> {
    match spd_factor(a, 0.0) {
        Ok(f) => Ok(f),
        Err(LinalgError::NotPositiveDefinite { .. }) => {
            let n = a.rows.max(1) as f64;
            // an all-zero matrix still needs a positive ridge
            let scale = (a.trace() / n).abs().max(f64::MIN_POSITIVE.sqrt());
            spd_factor(a, 1e-8 * scale).or_else(|_| spd_factor(a, 1e-4 * scale))
        }
        Err(e) => Err(e),
    }
}

/// `X' diag(w) X` as a dense symmetric matrix.
pub fn weighted_gram(x: &Matrix, weights: &[f64]) -> Result<Matrix, LinalgError> {
    if weights.len() != x.rows {
        return Err(LinalgError::DimensionMismatch { expected: x.rows, found: weights.len() });
    }
    let p = x.cols;
    let mut g = Matrix::zeros(p, p);
    for (i, w) in weights.iter().enumerate() {
        let r = x.row(i);
        for a in 0..p {
            let wa = w * r[a];
            for b in 0..=a {
                g[(a, b)] += wa * r[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            g[(b, a)] = g[(a, b)];
        }
    }
    Ok(g)
}

fn weighted_rhs(x: &Matrix, weights: &[f64], z: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if z.len() != x.rows {
        return Err(LinalgError::DimensionMismatch { expected: x.rows, found: z.len() });
    }
    let mut rhs = vec![0.0; x.cols];
    for (i, (w, zi)) in weights.iter().zip(z).enumerate() {
        for (acc, xij) in rhs.iter_mut().zip(x.row(i)) {
            *acc += w * zi * xij;
        }
    }
    Ok(rhs)
}

/// `(X' diag(w) X)^-1 X' diag(w) z`, the weighted least-squares solution.
pub fn weighted_normal_solve(x: &Matrix, weights: &[f64], z: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let g = weighted_gram(x, weights)?;
    let rhs = weighted_rhs(x, weights, z)?;
    spd_factor(&g, 0.0)?.solve(&rhs)
}

/// Like [`weighted_normal_solve`] but falls back to the ridge schedule of
/// [`spd_factor_regularized`] when the normal matrix is singular.
pub fn weighted_normal_solve_regularized(
    x: &Matrix,
    weights: &[f64],
    z: &[f64],
) -> Result<Vec<f64>, LinalgError> {
    let g = weighted_gram(x, weights)?;
    let rhs = weighted_rhs(x, weights, z)?;
    spd_factor_regularized(&g)?.solve(&rhs)
}
