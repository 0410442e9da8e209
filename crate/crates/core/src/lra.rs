//! Canonical low-rank approximations with polynomial bases, and Sobol'
//! indices in closed form from their coefficients.
//!
//! A rank-R model is `sum_l b_l * prod_i (sum_k z[l][i][k] P_k(u_i))` with
//! orthonormal univariate polynomials `P_k`. Construction is greedy: each
//! rank adds one rank-one term fit to the current residual by alternated
//! least squares (the correction step), then refits all normalizing
//! constants `b` (the updating step). The operating rank is selected by
//! 3-fold cross-validation, re-running the greedy construction per fold.
//!
//! Orthonormality collapses every moment of the model to small sums over
//! the coefficients: `E[v_l v_l'] = sum_k z_kl z_kl'` per dimension, which
//! gives the mean, the variance and the conditional second moments behind
//! the first-order and total indices without any integration.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

use crate::input_model::{InputError, InputModel};
use crate::ortho_poly::{BasisSpec, OrthoError};
use crate::regression::{
    generalization_error_rel, kfold_partition, variance_unbiased, ErrorReport, IncrementalOls,
    RegressionError,
};
use crate::sampling::ExperimentalDesign;

#[derive(Debug, Error)]
pub enum LraError {
    #[error("experimental design has no responses")]
    MissingResponses,
    #[error("design too small: N = {n} must exceed p + 1 = {need}")]
    UnderDetermined { n: usize, need: usize },
    #[error("correction step OLS failed along dimension {dim}: {source}")]
    CorrectionOls {
        dim: usize,
        #[source]
        source: RegressionError,
    },
    #[error(
        "ALS diverged in sweep {sweep}: error rose from {previous:.3e} to {current:.3e}"
    )]
    NonDecreasingGuard {
        sweep: usize,
        previous: f64,
        current: f64,
    },
    #[error("rank-one terms are collinear at the updating step")]
    CollinearRankOneTerms,
    #[error("rank {rank} construction failed: {source}")]
    RankFailed {
        rank: usize,
        #[source]
        source: Box<LraError>,
    },
    #[error("no candidate rank could be cross-validated")]
    AllRanksFailed,
    #[error("meta-model variance is zero")]
    ZeroVariance,
    #[error("variance formula produced a significantly negative value ({0:.3e})")]
    NegativeVariance(f64),
    #[error("interaction subsets above 12 variables are not enumerable (got {0})")]
    SubsetTooLarge(usize),
    #[error("invalid variable subset: {0}")]
    InvalidSubset(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Ortho(#[from] OrthoError),
    #[error(transparent)]
    Regression(#[from] RegressionError),
}

/// Cross-validation error recorded for one candidate rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCv {
    pub rank: usize,
    pub err_cv: f64,
}

/// Canonical low-rank approximation with a common polynomial degree per
/// dimension. `z[l][i][k]` is the coefficient of the degree-`k` orthonormal
/// polynomial in dimension `i` of the `l`-th rank-one term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LraModel {
    pub input_model: InputModel,
    pub basis: BasisSpec,
    pub rank: usize,
    pub b: Vec<f64>,
    pub z: Vec<Vec<Vec<f64>>>,
    pub errors: ErrorReport,
    pub selection_trace: Vec<RankCv>,
}

/// Settings for [`build_lra`].
#[derive(Debug, Clone)]
pub struct LraConfig {
    /// Largest candidate rank.
    pub r_max: usize,
    /// Maximum ALS sweeps per correction step.
    pub i_max: usize,
    /// Stop a correction step when the fractional decrease of the relative
    /// empirical error between sweeps falls below this.
    pub delta_err_min: f64,
    /// Folds for rank selection.
    pub cv_folds: usize,
}

impl Default for LraConfig {
    fn default() -> Self {
        Self {
            r_max: 10,
            i_max: 50,
            delta_err_min: 1e-6,
            cv_folds: 3,
        }
    }
}

// CV errors below this are round-off, not signal; comparing them raw would
// defeat the smaller-rank and smaller-degree tie-breaks.
const CV_NOISE_FLOOR: f64 = 1e-14;

/// Result of one correction step.
#[derive(Debug, Clone)]
pub struct CorrectionOutcome {
    /// Coefficients of the new rank-one term, `z[dim][degree]`.
    pub z: Vec<Vec<f64>>,
    /// ALS sweeps used.
    pub sweeps: usize,
    /// Final relative empirical error of the rank-one fit to the residual.
    pub err_r: f64,
}

// `tables[d][point][degree]`: orthonormal polynomial values at the
// standardized design points.
fn univariate_tables(
    points_standard: &[Vec<f64>],
    basis: &BasisSpec,
) -> Result<Vec<Vec<Vec<f64>>>, OrthoError> {
    let m = basis.dim();
    let mut tables = vec![Vec::with_capacity(points_standard.len()); m];
    let mut buf = Vec::new();
    for point in points_standard {
        for d in 0..m {
            basis.families[d].eval_all(basis.max_degrees[d], point[d], &mut buf)?;
            tables[d].push(buf.clone());
        }
    }
    Ok(tables)
}

/// Evaluate one rank-one term `prod_i sum_k z[i][k] P_k(u_i)` at a
/// standardized point.
pub fn rank_one_eval(z_l: &[Vec<f64>], u: &[f64], basis: &BasisSpec) -> f64 {
    let mut buf = Vec::new();
    let mut prod = 1.0;
    for (d, coeffs) in z_l.iter().enumerate() {
        basis.families[d]
            .eval_all(basis.max_degrees[d], u[d], &mut buf)
            .expect("basis evaluation");
        prod *= coeffs.iter().zip(&buf).map(|(z, p)| z * p).sum::<f64>();
    }
    prod
}

/// Fit one rank-one term to `residual` by alternated least squares.
///
/// The factors start at 1 in every dimension; each sweep solves the
/// one-dimensional OLS problem for every dimension in turn with the others
/// frozen. The step exits when the decrease of the relative empirical error
/// between sweeps falls below `delta_err_min` (as a fraction of the current
/// error) or after `i_max` sweeps. The error is normalized by the empirical
/// variance of the design responses.
pub fn correction_step(
    residual: &[f64],
    ed: &ExperimentalDesign,
    basis: &BasisSpec,
    i_max: usize,
    delta_err_min: f64,
) -> Result<CorrectionOutcome, LraError> {
    let y = ed.responses.as_ref().ok_or(LraError::MissingResponses)?;
    let var_y = variance_unbiased(y);
    let tables = univariate_tables(&ed.points_standard, basis)?;
    correction_step_impl(residual, &tables, var_y, i_max, delta_err_min)
}

fn correction_step_impl(
    residual: &[f64],
    tables: &[Vec<Vec<f64>>],
    var_y: f64,
    i_max: usize,
    delta_err_min: f64,
) -> Result<CorrectionOutcome, LraError> {
    let m = tables.len();
    let n = residual.len();
    let p1 = tables[0][0].len(); // p + 1 coefficients per dimension
    if n <= p1 {
        return Err(LraError::UnderDetermined { n, need: p1 });
    }
    let var_y = if var_y > 0.0 { var_y } else { 1.0 };

    // v_vals[d][n]: current value of the d-th univariate factor at point n
    let mut v_vals = vec![vec![1.0; n]; m];
    let mut z: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let mut c = vec![0.0; p1];
            c[0] = 1.0;
            c
        })
        .collect();

    let mut prev_err = f64::INFINITY;
    let mut sweeps = 0;
    while sweeps < i_max {
        sweeps += 1;
        for j in 0..m {
            // frozen product over the other dimensions
            let mut g = vec![1.0; n];
            for (d, vals) in v_vals.iter().enumerate() {
                if d == j {
                    continue;
                }
                for (gi, vi) in g.iter_mut().zip(vals) {
                    *gi *= vi;
                }
            }
            let mut ols = IncrementalOls::new(residual.to_vec());
            for k in 0..p1 {
                let col: Vec<f64> = (0..n).map(|i| g[i] * tables[j][i][k]).collect();
                ols.add_column(&col).map_err(|_| LraError::CorrectionOls {
                    dim: j,
                    source: RegressionError::RankDeficient { column: k },
                })?;
            }
            let coeffs = ols.coefficients();
            for (i, v) in v_vals[j].iter_mut().enumerate() {
                *v = coeffs
                    .iter()
                    .zip(&tables[j][i])
                    .map(|(c, t)| c * t)
                    .sum::<f64>();
            }
            z[j] = coeffs;
        }

        // relative empirical error of the current rank-one fit
        let mut sq = 0.0;
        for i in 0..n {
            let w: f64 = v_vals.iter().map(|vals| vals[i]).product();
            let e = residual[i] - w;
            sq += e * e;
        }
        let err = sq / n as f64 / var_y;
        if err > 1.1 * prev_err + 1e-14 {
            return Err(LraError::NonDecreasingGuard {
                sweep: sweeps,
                previous: prev_err,
                current: err,
            });
        }
        // fractional decrease: stops at stagnation instead of capping the
        // achievable error near delta_err_min itself
        let rel_decrease = if prev_err.is_finite() && prev_err > 0.0 {
            (prev_err - err) / prev_err
        } else {
            f64::INFINITY
        };
        prev_err = err;
        if err == 0.0 || rel_decrease < delta_err_min {
            break;
        }
    }

    Ok(CorrectionOutcome {
        z,
        sweeps,
        err_r: prev_err,
    })
}

/// Refit all normalizing constants: OLS of the responses on the rank-one
/// term values `w_1..w_r` at the design points.
pub fn updating_step(w_columns: &[Vec<f64>], responses: &[f64]) -> Result<Vec<f64>, LraError> {
    if w_columns.is_empty() {
        return Err(LraError::InvalidConfig("no rank-one terms".into()));
    }
    let mut ols = IncrementalOls::new(responses.to_vec());
    for col in w_columns {
        ols.add_column(col)
            .map_err(|_| LraError::CollinearRankOneTerms)?;
    }
    Ok(ols.coefficients())
}

// Greedy construction up to `r_max`: returns the per-rank snapshots
// (z tensor prefix length r and the refit b of that rank). Stops early
// without error when a correction step returns a numerically zero term.
struct GreedyResult {
    z: Vec<Vec<Vec<f64>>>,
    b_per_rank: Vec<Vec<f64>>,
}

fn greedy_construction(
    responses: &[f64],
    tables: &[Vec<Vec<f64>>],
    r_max: usize,
    i_max: usize,
    delta_err_min: f64,
) -> Result<GreedyResult, LraError> {
    let n = responses.len();
    let var_y = variance_unbiased(responses);
    let mut residual = responses.to_vec();
    let mut z: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut w_cols: Vec<Vec<f64>> = Vec::new();
    let mut b_per_rank: Vec<Vec<f64>> = Vec::new();

    let scale2 = var_y.max(semi_norm_sq(responses)).max(f64::MIN_POSITIVE);
    for r in 1..=r_max {
        // residual numerically exhausted: further ranks would fit round-off
        if semi_norm_sq(&residual) / scale2 < 1e-20 {
            break;
        }
        let wrap = |source: LraError| LraError::RankFailed {
            rank: r,
            source: Box::new(source),
        };
        let outcome = correction_step_impl(&residual, tables, var_y, i_max, delta_err_min)
            .map_err(wrap)?;
        let w: Vec<f64> = (0..n)
            .map(|i| {
                outcome
                    .z
                    .iter()
                    .enumerate()
                    .map(|(d, coeffs)| {
                        coeffs
                            .iter()
                            .zip(&tables[d][i])
                            .map(|(c, t)| c * t)
                            .sum::<f64>()
                    })
                    .product()
            })
            .collect();
        let w_norm = (w.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
        if w_norm < 1e-14 {
            break; // degenerate term: offer only ranks below r
        }
        w_cols.push(w);
        z.push(outcome.z);

        let b = match updating_step(&w_cols, responses) {
            Ok(b) => b,
            Err(LraError::CollinearRankOneTerms) => {
                // redundant term: offer only the ranks already built
                w_cols.pop();
                z.pop();
                break;
            }
            Err(e) => return Err(wrap(e)),
        };
        // model values and residual at the design points
        residual = responses.to_vec();
        for (col, bl) in w_cols.iter().zip(&b) {
            for (res, wv) in residual.iter_mut().zip(col) {
                *res -= bl * wv;
            }
        }
        b_per_rank.push(b);
    }

    if b_per_rank.is_empty() {
        return Err(LraError::AllRanksFailed);
    }
    Ok(GreedyResult { z, b_per_rank })
}

fn semi_norm_sq(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64
}

fn eval_terms(z: &[Vec<Vec<f64>>], b: &[f64], basis: &BasisSpec, u: &[f64]) -> f64 {
    z.iter()
        .zip(b)
        .map(|(zl, bl)| bl * rank_one_eval(zl, u, basis))
        .sum()
}

/// Build a rank-selected LRA with common degree `p`.
///
/// The greedy construction is re-run on each training fold; every candidate
/// rank is scored on the held-out fold and the CV-optimal rank (ties to the
/// smaller) is refit on the full design.
pub fn build_lra(
    ed: &ExperimentalDesign,
    input_model: &InputModel,
    p: u32,
    config: &LraConfig,
    cv_seed: u64,
) -> Result<LraModel, LraError> {
    let y = ed.responses.as_ref().ok_or(LraError::MissingResponses)?;
    let n = ed.n();
    let m = input_model.dim();
    if ed.m() != m {
        return Err(LraError::InvalidConfig(format!(
            "design dimension {} does not match input model dimension {m}",
            ed.m()
        )));
    }
    if config.r_max == 0 || config.cv_folds < 2 {
        return Err(LraError::InvalidConfig(
            "need r_max >= 1 and cv_folds >= 2".into(),
        ));
    }
    if n <= (p + 1) as usize {
        return Err(LraError::UnderDetermined {
            n,
            need: (p + 1) as usize,
        });
    }
    let basis = BasisSpec::for_input(&input_model.standard_families(), vec![p; m]);
    let tables = univariate_tables(&ed.points_standard, &basis)?;

    // cross-validated error per candidate rank
    let folds = kfold_partition(n, config.cv_folds.min(n), cv_seed);
    let mut cv_err = vec![0.0f64; config.r_max];
    let mut cv_cnt = vec![0usize; config.r_max];
    for fold in &folds {
        let train: Vec<usize> = (0..n).filter(|i| !fold.contains(i)).collect();
        let train_tables: Vec<Vec<Vec<f64>>> = tables
            .iter()
            .map(|t| train.iter().map(|&i| t[i].clone()).collect())
            .collect();
        let train_y: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let val_y: Vec<f64> = fold.iter().map(|&i| y[i]).collect();
        let val_points: Vec<&Vec<f64>> = fold.iter().map(|&i| &ed.points_standard[i]).collect();

        let greedy = greedy_construction(
            &train_y,
            &train_tables,
            config.r_max,
            config.i_max,
            config.delta_err_min,
        )?;
        for (r_idx, b) in greedy.b_per_rank.iter().enumerate() {
            let pred: Vec<f64> = val_points
                .iter()
                .map(|u| eval_terms(&greedy.z[..=r_idx], b, &basis, u))
                .collect();
            let err = generalization_error_rel(&pred, &val_y)?;
            cv_err[r_idx] += err;
            cv_cnt[r_idx] += 1;
        }
    }

    // candidate ranks are those every fold reached
    let mut selection_trace = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for r_idx in 0..config.r_max {
        if cv_cnt[r_idx] != folds.len() {
            continue;
        }
        let err = cv_err[r_idx] / folds.len() as f64;
        selection_trace.push(RankCv {
            rank: r_idx + 1,
            err_cv: err,
        });
        if best.is_none_or(|(_, e): (usize, f64)| err.max(CV_NOISE_FLOOR) < e.max(CV_NOISE_FLOOR)) {
            best = Some((r_idx + 1, err));
        }
    }
    let (rank, err_cv) = best.ok_or(LraError::AllRanksFailed)?;

    // final fit on the full design, truncated at the selected rank
    let greedy = greedy_construction(y, &tables, rank, config.i_max, config.delta_err_min)?;
    let reached = greedy.b_per_rank.len();
    let (rank, err_cv) = if reached < rank {
        // the full-data construction degenerated earlier than the folds did
        let fallback = selection_trace
            .iter()
            .filter(|rc| rc.rank <= reached)
            .min_by(|a, b| a.err_cv.partial_cmp(&b.err_cv).unwrap())
            .map(|rc| (rc.rank, rc.err_cv));
        fallback.ok_or(LraError::AllRanksFailed)?
    } else {
        (rank, err_cv)
    };
    let b = greedy.b_per_rank[rank - 1].clone();
    let z = greedy.z[..rank].to_vec();

    let pred: Vec<f64> = ed
        .points_standard
        .iter()
        .map(|u| eval_terms(&z, &b, &basis, u))
        .collect();
    let err_emp = crate::regression::empirical_error_rel(&pred, y).unwrap_or(0.0);

    Ok(LraModel {
        input_model: input_model.clone(),
        basis,
        rank,
        b,
        z,
        errors: ErrorReport {
            err_empirical_rel: Some(err_emp),
            err_cv_k_rel: Some(err_cv),
            ..Default::default()
        },
        selection_trace,
    })
}

/// Scan a degree grid and keep the build minimizing the cross-validation
/// error, ties to the smaller degree.
pub fn select_degree(
    ed: &ExperimentalDesign,
    input_model: &InputModel,
    p_grid: &[u32],
    config: &LraConfig,
    cv_seed: u64,
) -> Result<(u32, LraModel), LraError> {
    if p_grid.is_empty() {
        return Err(LraError::InvalidConfig("empty degree grid".into()));
    }
    let mut grid = p_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let mut best: Option<(u32, LraModel)> = None;
    for &p in &grid {
        let model = build_lra(ed, input_model, p, config, cv_seed)?;
        let err = model.errors.err_cv_k_rel.unwrap_or(f64::INFINITY);
        let better = best.as_ref().is_none_or(|(_, m)| {
            err.max(CV_NOISE_FLOOR)
                < m.errors.err_cv_k_rel.unwrap_or(f64::INFINITY).max(CV_NOISE_FLOOR)
        });
        if better {
            best = Some((p, model));
        }
    }
    Ok(best.expect("non-empty grid"))
}

impl LraModel {
    pub fn dim(&self) -> usize {
        self.input_model.dim()
    }

    /// Evaluate at a standardized point.
    pub fn eval_standard(&self, u: &[f64]) -> f64 {
        eval_terms(&self.z, &self.b, &self.basis, u)
    }

    /// Evaluate at a physical point.
    pub fn eval_physical(&self, x: &[f64]) -> Result<f64, LraError> {
        let u = self.input_model.to_standard(x)?;
        Ok(self.eval_standard(&u))
    }

    /// Mean: `sum_l b_l prod_i z[l][i][0]`.
    pub fn mean(&self) -> f64 {
        self.z
            .iter()
            .zip(&self.b)
            .map(|(zl, bl)| bl * zl.iter().map(|c| c[0]).product::<f64>())
            .sum()
    }

    // E[v_l^(i) v_l'^(i)] = sum_k z[l][i][k] z[l'][i][k]
    fn factor_inner(&self, l: usize, lp: usize, dim: usize) -> f64 {
        self.z[l][dim]
            .iter()
            .zip(&self.z[lp][dim])
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Variance from the coefficients:
    /// `sum_l sum_l' b_l b_l' (prod_i sum_k z_kl z_kl' - prod_i z_0l z_0l')`.
    /// Tiny negative round-off is clamped to zero.
    pub fn variance(&self) -> Result<f64, LraError> {
        let r = self.rank;
        let m = self.dim();
        let mut acc = 0.0;
        for l in 0..r {
            for lp in 0..r {
                let mut full = 1.0;
                let mut consts = 1.0;
                for d in 0..m {
                    full *= self.factor_inner(l, lp, d);
                    consts *= self.z[l][d][0] * self.z[lp][d][0];
                }
                acc += self.b[l] * self.b[lp] * (full - consts);
            }
        }
        let mean = self.mean();
        if acc < -1e-10 * (mean * mean + 1.0) {
            return Err(LraError::NegativeVariance(acc));
        }
        Ok(acc.max(0.0))
    }

    // E[(conditional expectation given the variables of `mask`)^2]:
    // sum_l sum_l' b_l b_l' (prod_{j not in u} z_0l z_0l')
    //                        (prod_{i in u} sum_k z_kl z_kl').
    fn conditional_mean_square(&self, mask: &[bool]) -> f64 {
        let r = self.rank;
        let mut acc = 0.0;
        for l in 0..r {
            for lp in 0..r {
                let mut prod = 1.0;
                for (d, &inside) in mask.iter().enumerate() {
                    prod *= if inside {
                        self.factor_inner(l, lp, d)
                    } else {
                        self.z[l][d][0] * self.z[lp][d][0]
                    };
                }
                acc += self.b[l] * self.b[lp] * prod;
            }
        }
        acc
    }

    fn subset_mask(&self, u: &[usize]) -> Result<Vec<bool>, LraError> {
        let m = self.dim();
        if u.is_empty() {
            return Err(LraError::InvalidSubset("empty subset".into()));
        }
        let mut mask = vec![false; m];
        for &i in u {
            if i >= m {
                return Err(LraError::InvalidSubset(format!(
                    "variable index {i} out of range for dimension {m}"
                )));
            }
            mask[i] = true;
        }
        Ok(mask)
    }

    /// First-order Sobol' index of the subset `u` (0-based indices).
    pub fn sobol_first(&self, u: &[usize]) -> Result<f64, LraError> {
        let mask = self.subset_mask(u)?;
        let var = self.variance()?;
        if var <= 0.0 {
            return Err(LraError::ZeroVariance);
        }
        let mean = self.mean();
        Ok((self.conditional_mean_square(&mask) - mean * mean) / var)
    }

    /// Total Sobol' index of the subset `u`, via the complement identity
    /// `S^T_u = 1 - S~_{\u}` with the interchanged-index second moment.
    pub fn sobol_total(&self, u: &[usize]) -> Result<f64, LraError> {
        let mask = self.subset_mask(u)?;
        let var = self.variance()?;
        if var <= 0.0 {
            return Err(LraError::ZeroVariance);
        }
        let mean = self.mean();
        let complement: Vec<bool> = mask.iter().map(|&b| !b).collect();
        Ok(1.0 - (self.conditional_mean_square(&complement) - mean * mean) / var)
    }

    /// Interaction Sobol' index `S_u = S~_u - sum over proper non-empty
    /// subsets v of S_v`, enumerated over the `2^|u|` subsets.
    pub fn sobol_interaction(&self, u: &[usize]) -> Result<f64, LraError> {
        let mask = self.subset_mask(u)?;
        let mut vars: Vec<usize> = u.to_vec();
        vars.sort_unstable();
        vars.dedup();
        if vars.len() > 12 {
            return Err(LraError::SubsetTooLarge(vars.len()));
        }
        let _ = mask;
        let var = self.variance()?;
        if var <= 0.0 {
            return Err(LraError::ZeroVariance);
        }
        let mean = self.mean();
        let full = (1u32 << vars.len()) - 1;
        let mut interaction: HashMap<u32, f64> = HashMap::new();
        // increasing popcount order so subsets are ready before supersets
        let mut masks: Vec<u32> = (1..=full).collect();
        masks.sort_by_key(|m| m.count_ones());
        for bits in masks {
            let subset: Vec<usize> = vars
                .iter()
                .enumerate()
                .filter(|(pos, _)| bits >> pos & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            let mut dim_mask = vec![false; self.dim()];
            for &v in &subset {
                dim_mask[v] = true;
            }
            let first = (self.conditional_mean_square(&dim_mask) - mean * mean) / var;
            let mut s = first;
            let mut sub = (bits - 1) & bits;
            while sub != 0 {
                s -= interaction[&sub];
                sub = (sub - 1) & bits;
            }
            interaction.insert(bits, s);
        }
        Ok(interaction[&full])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("LRA model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}
