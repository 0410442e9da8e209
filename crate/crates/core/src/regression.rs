//! Least-squares machinery shared by the PCE and LRA builders: OLS through
//! an orthogonal factorization, empirical and leave-one-out errors, the
//! corrected LOO estimate, k-fold cross-validation and least-angle
//! regression for predictor selection.
//!
//! The factorization is an incrementally updated Gram-Schmidt QR. Adding one
//! column costs O(N * P) and keeps the thin Q (hence the hat diagonal), the
//! inverse triangular factor (hence `tr((A^T A)^-1)`) and the residual
//! current, which is what makes scoring every prefix of a LAR path cheap.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegressionError {
    #[error("system is under-determined: {n} rows < {p} columns")]
    UnderDetermined { n: usize, p: usize },
    #[error("design matrix is rank deficient (column {column})")]
    RankDeficient { column: usize },
    #[error("empty point set")]
    EmptySet,
    #[error("responses have zero empirical variance")]
    ZeroVariance,
    #[error("leverage of point {index} is 1 (exact interpolation)")]
    LeverageOne { index: usize },
    #[error("non-finite value in {place}")]
    NonFinite { place: &'static str },
    #[error("fold {fold} fit failed: {source}")]
    FitFailure {
        fold: usize,
        #[source]
        source: Box<RegressionError>,
    },
    #[error("least-angle regression broke down at step {step}: {reason}")]
    NumericalBreakdown { step: usize, reason: &'static str },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// N x P regression design matrix (rows = design points, columns = regressors).
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    values: Vec<Vec<f64>>,
    labels: Vec<String>,
}

impl DesignMatrix {
    pub fn new(values: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self, RegressionError> {
        if values.is_empty() || values[0].is_empty() {
            return Err(RegressionError::EmptySet);
        }
        let p = values[0].len();
        if labels.len() != p {
            return Err(RegressionError::InvalidArgument(format!(
                "{} labels for {} columns",
                labels.len(),
                p
            )));
        }
        for row in &values {
            if row.len() != p {
                return Err(RegressionError::InvalidArgument(
                    "ragged design matrix".into(),
                ));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(RegressionError::NonFinite {
                    place: "design matrix",
                });
            }
        }
        Ok(Self { values, labels })
    }

    /// Columns labelled `c0..`.
    pub fn unlabeled(values: Vec<Vec<f64>>) -> Result<Self, RegressionError> {
        let p = values.first().map_or(0, Vec::len);
        let labels = (0..p).map(|j| format!("c{j}")).collect();
        Self::new(values, labels)
    }

    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn n_cols(&self) -> usize {
        self.values[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }
}

/// Meta-model accuracy estimates, all relative to the empirical response
/// variance (unbiased, N-1 denominator).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub err_empirical_rel: Option<f64>,
    pub err_loo_rel: Option<f64>,
    pub err_loo_corrected_rel: Option<f64>,
    pub err_cv_k_rel: Option<f64>,
    pub err_generalization_rel: Option<f64>,
}

/// Unbiased empirical variance (N-1 denominator).
pub fn variance_unbiased(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (values.len() - 1) as f64
}

/// Discrete L2 semi-norm: `sqrt(mean of squares)`.
pub fn semi_norm(values: &[f64]) -> Result<f64, RegressionError> {
    if values.is_empty() {
        return Err(RegressionError::EmptySet);
    }
    Ok((values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt())
}

/// Relative empirical error of predictions against observed responses.
pub fn empirical_error_rel(
    predictions: &[f64],
    responses: &[f64],
) -> Result<f64, RegressionError> {
    relative_mse(predictions, responses)
}

/// Relative generalization error on a validation set.
pub fn generalization_error_rel(
    predictions: &[f64],
    responses: &[f64],
) -> Result<f64, RegressionError> {
    relative_mse(predictions, responses)
}

fn relative_mse(predictions: &[f64], responses: &[f64]) -> Result<f64, RegressionError> {
    if predictions.len() != responses.len() {
        return Err(RegressionError::InvalidArgument(
            "prediction/response length mismatch".into(),
        ));
    }
    let diff: Vec<f64> = predictions
        .iter()
        .zip(responses)
        .map(|(p, y)| p - y)
        .collect();
    let num = semi_norm(&diff)?;
    let var = variance_unbiased(responses);
    if var <= 0.0 {
        return Err(RegressionError::ZeroVariance);
    }
    Ok(num * num / var)
}

/// Ordinary least squares through the QR factorization. The design must be
/// over-determined and numerically full rank (condition estimate below 1e12).
pub fn ols_solve(a: &DesignMatrix, y: &[f64]) -> Result<Vec<f64>, RegressionError> {
    let (n, p) = (a.n_rows(), a.n_cols());
    if n < p {
        return Err(RegressionError::UnderDetermined { n, p });
    }
    if y.len() != n {
        return Err(RegressionError::InvalidArgument(
            "response length mismatch".into(),
        ));
    }
    let mut qr = IncrementalOls::new(y.to_vec());
    for j in 0..p {
        qr.add_column(&a.column(j))
            .map_err(|_| RegressionError::RankDeficient { column: j })?;
    }
    Ok(qr.coefficients())
}

/// Diagonal of the hat matrix `A (A^T A)^-1 A^T`, computed as the squared
/// row norms of the thin orthogonal factor.
pub fn hat_diagonal(a: &DesignMatrix) -> Result<Vec<f64>, RegressionError> {
    let (n, p) = (a.n_rows(), a.n_cols());
    if n < p {
        return Err(RegressionError::UnderDetermined { n, p });
    }
    let mut qr = IncrementalOls::new(vec![0.0; n]);
    for j in 0..p {
        qr.add_column(&a.column(j))
            .map_err(|_| RegressionError::RankDeficient { column: j })?;
    }
    Ok(qr.hat)
}

/// Leave-one-out error from the hat diagonal:
/// `mean_i ((y_i - yhat_i) / (1 - h_i))^2`.
pub fn loo_error(a: &DesignMatrix, y: &[f64], h_diag: &[f64]) -> Result<f64, RegressionError> {
    let coeffs = ols_solve(a, y)?;
    let mut acc = 0.0;
    for (i, row) in a.rows().iter().enumerate() {
        let h = h_diag[i];
        if h >= 1.0 - 1e-12 {
            return Err(RegressionError::LeverageOne { index: i });
        }
        let fit: f64 = row.iter().zip(&coeffs).map(|(x, c)| x * c).sum();
        let e = (y[i] - fit) / (1.0 - h);
        acc += e * e;
    }
    Ok(acc / a.n_rows() as f64)
}

/// Convention for the trace term of the corrected leave-one-out factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceScaling {
    /// `tr((A^T A)^-1)` with the design matrix as given.
    #[default]
    Unscaled,
    /// `tr((A^T A / N)^-1)`, i.e. the Gram matrix normalized by N.
    ScaledByN,
}

/// Corrected leave-one-out error
/// `err_loo * (1 - P/N)^-1 * (1 + tr((A^T A)^-1))`.
pub fn corrected_loo(
    err_loo_rel: f64,
    a: &DesignMatrix,
    scaling: TraceScaling,
) -> Result<f64, RegressionError> {
    let (n, p) = (a.n_rows(), a.n_cols());
    if n <= p {
        return Err(RegressionError::UnderDetermined { n, p });
    }
    let mut qr = IncrementalOls::new(vec![0.0; n]);
    for j in 0..p {
        qr.add_column(&a.column(j))
            .map_err(|_| RegressionError::RankDeficient { column: j })?;
    }
    Ok(err_loo_rel * qr.corrected_loo_factor(scaling))
}

/// Indices of each validation fold: a seeded shuffle dealt round-robin, so
/// fold sizes differ by at most one and every point lands in exactly one fold.
pub fn kfold_partition(n: usize, k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let mut folds = vec![Vec::with_capacity(n / k + 1); k];
    for (pos, idx) in indices.into_iter().enumerate() {
        folds[pos % k].push(idx);
    }
    folds
}

/// k-fold cross-validation error: the average over folds of the relative
/// generalization error of a model fit on the complement of the fold.
///
/// `fit_predict(train, validation)` must return predictions at the
/// validation indices of a model fit on the training indices.
pub fn kfold_cv<F>(
    responses: &[f64],
    k: usize,
    seed: u64,
    mut fit_predict: F,
) -> Result<f64, RegressionError>
where
    F: FnMut(&[usize], &[usize]) -> Result<Vec<f64>, RegressionError>,
{
    let n = responses.len();
    if k < 2 || k > n {
        return Err(RegressionError::InvalidArgument(format!(
            "need 2 <= k <= N, got k={k}, N={n}"
        )));
    }
    let folds = kfold_partition(n, k, seed);
    let mut acc = 0.0;
    for (f, fold) in folds.iter().enumerate() {
        let train: Vec<usize> = (0..n).filter(|i| !fold.contains(i)).collect();
        let pred = fit_predict(&train, fold).map_err(|e| RegressionError::FitFailure {
            fold: f,
            source: Box::new(e),
        })?;
        let truth: Vec<f64> = fold.iter().map(|&i| responses[i]).collect();
        acc += generalization_error_rel(&pred, &truth)?;
    }
    Ok(acc / k as f64)
}

/// Least-angle regression path: the order in which predictors join the
/// active set. Coefficients are intentionally not returned; callers refit
/// the selected sets by OLS.
#[derive(Debug, Clone)]
pub struct LarPath {
    pub order: Vec<usize>,
    /// Step at which the path ended early because the equiangular direction
    /// became degenerate, if it did.
    pub breakdown: Option<usize>,
}

impl LarPath {
    /// The nested active set after `steps` steps.
    pub fn active_set(&self, steps: usize) -> &[usize] {
        &self.order[..steps]
    }
}

/// Run least-angle regression on internally centered and normalized columns.
///
/// Returns the selection order defining the nested active sets. Fails if the
/// very first equiangular direction is degenerate; a later degeneracy
/// truncates the path and is reported in [`LarPath::breakdown`].
pub fn lar_path(a: &DesignMatrix, y: &[f64], max_steps: usize) -> Result<LarPath, RegressionError> {
    lar_path_impl(a.rows(), y, max_steps)
}

pub(crate) fn lar_path_impl(
    rows: &[Vec<f64>],
    y: &[f64],
    max_steps: usize,
) -> Result<LarPath, RegressionError> {
    let n = rows.len();
    let p = rows.first().map_or(0, Vec::len);
    if y.len() != n {
        return Err(RegressionError::InvalidArgument(
            "response length mismatch".into(),
        ));
    }
    if max_steps == 0 || p == 0 {
        return Ok(LarPath {
            order: Vec::new(),
            breakdown: None,
        });
    }

    // center y, center + unit-normalize columns; constant columns are
    // excluded from selection
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let mut resid: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut eligible = vec![true; p];
    for j in 0..p {
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let mut c: Vec<f64> = rows.iter().map(|r| r[j] - mean).collect();
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            eligible[j] = false;
        } else {
            for v in &mut c {
                *v /= norm;
            }
        }
        cols.push(c);
    }

    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

    let n_eligible = eligible.iter().filter(|&&e| e).count();
    let steps = max_steps.min(n_eligible).min(n.saturating_sub(1));
    let mut order: Vec<usize> = Vec::with_capacity(steps);
    let mut active = vec![false; p];
    let mut signs: Vec<f64> = Vec::new();
    // lower-triangular Cholesky factor of G = (S X_A)^T (S X_A), row-major
    let mut chol: Vec<Vec<f64>> = Vec::new();
    let mut breakdown = None;

    for step in 0..steps {
        // most correlated inactive predictor
        let mut best: Option<(f64, usize)> = None;
        for j in 0..p {
            if !eligible[j] || active[j] {
                continue;
            }
            let c = dot(&cols[j], &resid).abs();
            if best.is_none_or(|(bc, _)| c > bc) {
                best = Some((c, j));
            }
        }
        let Some((c_max, j_new)) = best else { break };
        if c_max < 1e-14 {
            break; // residual orthogonal to everything left
        }
        let s_new = dot(&cols[j_new], &resid).signum();

        // border the Cholesky factor of the active Gram matrix
        let k = order.len();
        let mut row = Vec::with_capacity(k + 1);
        for (idx, &jq) in order.iter().enumerate() {
            let g = s_new * signs[idx] * dot(&cols[j_new], &cols[jq]);
            let mut v = g;
            for t in 0..idx {
                v -= row[t] * chol[idx][t];
            }
            row.push(v / chol[idx][idx]);
        }
        let d2 = 1.0 - row.iter().map(|v| v * v).sum::<f64>();
        if d2 <= 1e-12 {
            if k == 0 {
                return Err(RegressionError::NumericalBreakdown {
                    step,
                    reason: "first predictor has degenerate norm",
                });
            }
            breakdown = Some(step);
            break;
        }
        row.push(d2.sqrt());
        chol.push(row);
        order.push(j_new);
        signs.push(s_new);
        active[j_new] = true;

        // equiangular direction: solve G w = 1 via the Cholesky factor
        let k = order.len();
        let mut w = vec![0.0; k];
        for i in 0..k {
            let mut v = 1.0;
            for t in 0..i {
                v -= chol[i][t] * w[t];
            }
            w[i] = v / chol[i][i];
        }
        for i in (0..k).rev() {
            let mut v = w[i];
            for t in (i + 1)..k {
                v -= chol[t][i] * w[t];
            }
            w[i] = v / chol[i][i];
        }
        let sum_w: f64 = w.iter().sum();
        if !(sum_w > 0.0) {
            order.pop();
            signs.pop();
            chol.pop();
            if order.is_empty() {
                return Err(RegressionError::NumericalBreakdown {
                    step,
                    reason: "equiangular direction degenerate",
                });
            }
            breakdown = Some(step);
            break;
        }
        let a_a = 1.0 / sum_w.sqrt();
        let mut u = vec![0.0; n];
        for (idx, &jq) in order.iter().enumerate() {
            let coef = a_a * w[idx] * signs[idx];
            for (ui, x) in u.iter_mut().zip(&cols[jq]) {
                *ui += coef * x;
            }
        }

        // step length to the next equi-correlation point
        let c_cur = dot(&cols[order[0]], &resid).abs();
        let mut gamma = c_cur / a_a; // full step if nothing else joins
        for j in 0..p {
            if !eligible[j] || active[j] {
                continue;
            }
            let cj = dot(&cols[j], &resid);
            let aj = dot(&cols[j], &u);
            for cand in [(c_cur - cj) / (a_a - aj), (c_cur + cj) / (a_a + aj)] {
                if cand.is_finite() && cand > 1e-14 && cand < gamma {
                    gamma = cand;
                }
            }
        }
        if !gamma.is_finite() {
            breakdown = Some(step);
            break;
        }
        for (r, ui) in resid.iter_mut().zip(&u) {
            *r -= gamma * ui;
        }
    }

    Ok(LarPath { order, breakdown })
}

/// Incrementally updated Gram-Schmidt QR with the observables needed for
/// model scoring: fitted values, residual, hat diagonal and `tr((A^T A)^-1)`.
pub(crate) struct IncrementalOls {
    y: Vec<f64>,
    q_cols: Vec<Vec<f64>>,
    /// columns of R^-1; column j holds j+1 entries (upper triangle)
    r_inv: Vec<Vec<f64>>,
    r_diag: Vec<f64>,
    qty: Vec<f64>,
    resid: Vec<f64>,
    hat: Vec<f64>,
    rinv_fro2: f64,
}

pub(crate) struct ColumnRejected;

impl IncrementalOls {
    pub fn new(y: Vec<f64>) -> Self {
        let n = y.len();
        Self {
            resid: y.clone(),
            y,
            q_cols: Vec::new(),
            r_inv: Vec::new(),
            r_diag: Vec::new(),
            qty: Vec::new(),
            hat: vec![0.0; n],
            rinv_fro2: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.q_cols.len()
    }

    /// Orthogonalize `col` against the current basis and append it. Rejects
    /// columns that are numerically inside the current span or would push
    /// the condition estimate past 1e12.
    pub fn add_column(&mut self, col: &[f64]) -> Result<(), ColumnRejected> {
        let n = self.n();
        assert_eq!(col.len(), n);
        if self.p() >= n {
            return Err(ColumnRejected);
        }
        let orig_norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(orig_norm > 0.0) || !orig_norm.is_finite() {
            return Err(ColumnRejected);
        }
        let mut v = col.to_vec();
        let mut r_col = vec![0.0; self.p()];
        // modified Gram-Schmidt with one reorthogonalization pass
        for _ in 0..2 {
            for (j, q) in self.q_cols.iter().enumerate() {
                let t: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                r_col[j] += t;
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= t * qi;
                }
            }
        }
        let rho = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if rho < 1e-12 * orig_norm {
            return Err(ColumnRejected);
        }
        let max_d = self.r_diag.iter().fold(rho, |a, &b| a.max(b));
        let min_d = self.r_diag.iter().fold(rho, |a, &b| a.min(b));
        if max_d / min_d > 1e12 {
            return Err(ColumnRejected);
        }
        for vi in &mut v {
            *vi /= rho;
        }

        // grow R^-1: new column is (-R^-1 r_col / rho, 1/rho)
        let p = self.p();
        let mut new_inv = vec![0.0; p + 1];
        for i in 0..p {
            let mut acc = 0.0;
            for (j, rc) in r_col.iter().enumerate().skip(i) {
                acc += self.r_inv[j][i] * rc;
            }
            new_inv[i] = -acc / rho;
        }
        new_inv[p] = 1.0 / rho;
        self.rinv_fro2 += new_inv.iter().map(|x| x * x).sum::<f64>();
        self.r_inv.push(new_inv);
        self.r_diag.push(rho);

        let qt_y: f64 = v.iter().zip(&self.y).map(|(a, b)| a * b).sum();
        for ((res, h), qi) in self.resid.iter_mut().zip(&mut self.hat).zip(&v) {
            *res -= qt_y * qi;
            *h += qi * qi;
        }
        self.qty.push(qt_y);
        self.q_cols.push(v);
        Ok(())
    }

    /// Coefficients of the current fit, `R^-1 Q^T y`.
    pub fn coefficients(&self) -> Vec<f64> {
        let p = self.p();
        let mut c = vec![0.0; p];
        for (j, col) in self.r_inv.iter().enumerate() {
            for (i, rij) in col.iter().enumerate() {
                c[i] += rij * self.qty[j];
            }
        }
        c
    }

    /// Relative empirical error of the current fit.
    pub fn err_empirical_rel(&self, var_y: f64) -> f64 {
        let mse = self.resid.iter().map(|r| r * r).sum::<f64>() / self.n() as f64;
        mse / var_y
    }

    /// Relative leave-one-out error of the current fit.
    pub fn err_loo_rel(&self, var_y: f64) -> Result<f64, RegressionError> {
        let mut acc = 0.0;
        for (i, (r, h)) in self.resid.iter().zip(&self.hat).enumerate() {
            if *h >= 1.0 - 1e-12 {
                return Err(RegressionError::LeverageOne { index: i });
            }
            let e = r / (1.0 - h);
            acc += e * e;
        }
        Ok(acc / self.n() as f64 / var_y)
    }

    /// Multiplier `(1 - P/N)^-1 (1 + tr((A^T A)^-1))`.
    pub fn corrected_loo_factor(&self, scaling: TraceScaling) -> f64 {
        let n = self.n() as f64;
        let p = self.p() as f64;
        let trace = match scaling {
            TraceScaling::Unscaled => self.rinv_fro2,
            TraceScaling::ScaledByN => self.rinv_fro2 * n,
        };
        (1.0 - p / n).recip() * (1.0 + trace)
    }
}
