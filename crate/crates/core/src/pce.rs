//! Sparse polynomial chaos expansions built by hybrid least-angle regression.
//!
//! For every candidate pair of total degree `p_t` and hyperbolic exponent
//! `q`, the candidate basis is enumerated, LAR orders the predictors, each
//! nested active set is refit by OLS and scored by the corrected
//! leave-one-out error, and the global minimizer wins. Ties are broken by
//! smaller active set, then smaller `p_t`, then larger `q`.
//!
//! With the coefficients in hand, moments and Sobol' indices come for free:
//! the mean is the constant coefficient, the variance is the sum of squared
//! non-constant coefficients, and an index is a partial sum of squared
//! coefficients over an index set.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::input_model::{InputError, InputModel};
use crate::ortho_poly::{
    truncation_set_capped, BasisSpec, MultiIndex, OrthoError, PolyFamily,
};
use crate::regression::{
    lar_path_impl, variance_unbiased, ErrorReport, IncrementalOls, RegressionError, TraceScaling,
};
use crate::sampling::ExperimentalDesign;

#[derive(Debug, Error)]
pub enum PceError {
    #[error("experimental design has no responses")]
    MissingResponses,
    #[error("no feasible candidate model for any (p_t, q) pair")]
    NoFeasibleModel,
    #[error("meta-model variance is zero")]
    ZeroVariance,
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

/// One active basis term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PceTerm {
    pub alpha: MultiIndex,
    pub coefficient: f64,
}

/// Sparse polynomial chaos expansion. The zero multi-index is always the
/// first term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PceModel {
    pub input_model: InputModel,
    pub basis: BasisSpec,
    pub terms: Vec<PceTerm>,
    pub selected_p_t: u32,
    pub selected_q: f64,
    pub errors: ErrorReport,
}

/// Settings for [`build_pce`].
#[derive(Debug, Clone)]
pub struct PceConfig {
    /// Inclusive range of candidate total degrees.
    pub p_t_range: (u32, u32),
    /// Hyperbolic truncation exponents to scan.
    pub q_set: Vec<f64>,
    /// Candidate bases larger than this are skipped (the `p_t` sweep for
    /// that `q` stops there).
    pub max_candidate_basis: usize,
    /// Convention for the corrected-LOO trace term.
    pub trace_scaling: TraceScaling,
    /// Stop raising `p_t` after this many consecutive non-improvements.
    pub early_stop_patience: usize,
}

impl Default for PceConfig {
    fn default() -> Self {
        Self {
            p_t_range: (1, 20),
            q_set: vec![0.25, 0.5, 0.75, 1.0],
            max_candidate_basis: 10_000,
            trace_scaling: TraceScaling::Unscaled,
            early_stop_patience: 2,
        }
    }
}

struct Candidate {
    score: f64,
    active: Vec<MultiIndex>,
    p_t: u32,
    q: f64,
}

impl Candidate {
    // lexicographic preference: score, then |A|, then p_t, then larger q
    fn better_than(&self, other: &Candidate) -> bool {
        let key = |c: &Candidate| (c.score, c.active.len() as f64, c.p_t as f64, -c.q);
        key(self) < key(other)
    }
}

/// Build a sparse PCE on an experimental design by hybrid LAR with
/// `(p_t, q)` selection through the corrected leave-one-out error.
pub fn build_pce(
    ed: &ExperimentalDesign,
    input_model: &InputModel,
    config: &PceConfig,
) -> Result<PceModel, PceError> {
    let y = ed.responses.as_ref().ok_or(PceError::MissingResponses)?;
    let n = ed.n();
    let m = input_model.dim();
    if ed.m() != m {
        return Err(PceError::InvalidConfig(format!(
            "design dimension {} does not match input model dimension {m}",
            ed.m()
        )));
    }
    let (p_lo, p_hi) = config.p_t_range;
    if p_lo > p_hi {
        return Err(PceError::InvalidConfig("empty p_t range".into()));
    }
    if config.q_set.is_empty() {
        return Err(PceError::InvalidConfig("empty q set".into()));
    }
    for &q in &config.q_set {
        if !(q > 0.0 && q <= 1.0) {
            return Err(PceError::InvalidConfig(format!("q = {q} outside (0, 1]")));
        }
    }

    let families: Vec<PolyFamily> = input_model
        .standard_families()
        .into_iter()
        .map(Into::into)
        .collect();
    let var_y = variance_unbiased(y);

    // constant responses: the constant expansion is exact
    if var_y <= 0.0 {
        let y0 = y.iter().sum::<f64>() / n as f64;
        return Ok(finish_model(
            input_model,
            &families,
            vec![(MultiIndex::zeros(m), y0)],
            p_lo,
            *config
                .q_set
                .iter()
                .max_by(|a, b| a.partial_cmp(b).unwrap())
                .unwrap(),
            ErrorReport {
                err_empirical_rel: Some(0.0),
                err_loo_rel: Some(0.0),
                err_loo_corrected_rel: Some(0.0),
                ..Default::default()
            },
        ));
    }

    let mut q_sorted = config.q_set.clone();
    q_sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    q_sorted.dedup();

    let mut best: Option<Candidate> = None;
    for &q in &q_sorted {
        let mut worse_streak = 0usize;
        let mut prev_cell_score = f64::INFINITY;
        for p_t in p_lo..=p_hi {
            let alphas = match truncation_set_capped(m, p_t, q, config.max_candidate_basis) {
                Ok(a) => a,
                Err(OrthoError::SizeOverflow { .. }) => break,
                Err(e) => return Err(e.into()),
            };
            let cell = score_cell(ed, y, var_y, &families, &alphas, p_t, q, config)?;
            if let Some(c) = cell {
                let cell_score = c.score;
                if best.as_ref().is_none_or(|b| c.better_than(b)) {
                    best = Some(c);
                }
                if cell_score >= prev_cell_score {
                    worse_streak += 1;
                    if worse_streak >= config.early_stop_patience {
                        break;
                    }
                } else {
                    worse_streak = 0;
                }
                prev_cell_score = cell_score;
            }
        }
    }

    let best = best.ok_or(PceError::NoFeasibleModel)?;

    // final refit of the winning active set on the full design
    let mut inc = IncrementalOls::new(y.clone());
    inc.add_column(&vec![1.0; n])
        .map_err(|_| PceError::NoFeasibleModel)?;
    let tables = univariate_tables(ed, &families, best.p_t)?;
    for alpha in &best.active {
        let col = basis_column(&tables, alpha);
        inc.add_column(&col).map_err(|_| {
            PceError::Regression(RegressionError::RankDeficient { column: 0 })
        })?;
    }
    let coeffs = inc.coefficients();
    let err_loo = inc.err_loo_rel(var_y)?;
    let errors = ErrorReport {
        err_empirical_rel: Some(inc.err_empirical_rel(var_y)),
        err_loo_rel: Some(err_loo),
        err_loo_corrected_rel: Some(err_loo * inc.corrected_loo_factor(config.trace_scaling)),
        ..Default::default()
    };

    let mut terms: Vec<(MultiIndex, f64)> = vec![(MultiIndex::zeros(m), coeffs[0])];
    terms.extend(
        best.active
            .iter()
            .cloned()
            .zip(coeffs[1..].iter().copied()),
    );
    Ok(finish_model(
        input_model, &families, terms, best.p_t, best.q, errors,
    ))
}

fn finish_model(
    input_model: &InputModel,
    families: &[PolyFamily],
    mut terms: Vec<(MultiIndex, f64)>,
    p_t: u32,
    q: f64,
    errors: ErrorReport,
) -> PceModel {
    let m = input_model.dim();
    // canonical order: zero term first, the rest by total degree then lex
    terms[1..].sort_by(|a, b| {
        a.0.total_degree()
            .cmp(&b.0.total_degree())
            .then_with(|| a.0 .0.cmp(&b.0 .0))
    });
    let mut max_degrees = vec![0u32; m];
    for (alpha, _) in &terms {
        for (d, &a) in alpha.0.iter().enumerate() {
            max_degrees[d] = max_degrees[d].max(a);
        }
    }
    PceModel {
        input_model: input_model.clone(),
        basis: BasisSpec::new(families.to_vec(), max_degrees),
        terms: terms
            .into_iter()
            .map(|(alpha, coefficient)| PceTerm { alpha, coefficient })
            .collect(),
        selected_p_t: p_t,
        selected_q: q,
        errors,
    }
}

// Per-dimension tables of orthonormal polynomial values at the standardized
// design points: tables[d][point][degree].
fn univariate_tables(
    ed: &ExperimentalDesign,
    families: &[PolyFamily],
    p: u32,
) -> Result<Vec<Vec<Vec<f64>>>, OrthoError> {
    let m = families.len();
    let mut tables = vec![Vec::with_capacity(ed.n()); m];
    let mut buf = Vec::new();
    for point in &ed.points_standard {
        for (d, fam) in families.iter().enumerate() {
            fam.eval_all(p, point[d], &mut buf)?;
            tables[d].push(buf.clone());
        }
    }
    Ok(tables)
}

fn basis_column(tables: &[Vec<Vec<f64>>], alpha: &MultiIndex) -> Vec<f64> {
    let n = tables[0].len();
    let mut col = vec![1.0; n];
    for (d, &a) in alpha.0.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let table = &tables[d];
        for (ci, row) in col.iter_mut().zip(table) {
            *ci *= row[a as usize];
        }
    }
    col
}

// Score one (p_t, q) cell: run LAR over the non-constant candidates and pick
// the prefix with minimal corrected LOO. Returns None if even the constant
// model cannot be scored.
#[allow(clippy::too_many_arguments)]
fn score_cell(
    ed: &ExperimentalDesign,
    y: &[f64],
    var_y: f64,
    families: &[PolyFamily],
    alphas: &[MultiIndex],
    p_t: u32,
    q: f64,
    config: &PceConfig,
) -> Result<Option<Candidate>, PceError> {
    let n = ed.n();
    let tables = univariate_tables(ed, families, p_t)?;
    let nonzero: Vec<&MultiIndex> = alphas.iter().filter(|a| !a.is_zero()).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            nonzero
                .iter()
                .map(|alpha| {
                    alpha
                        .0
                        .iter()
                        .enumerate()
                        .filter(|(_, &a)| a > 0)
                        .map(|(d, &a)| tables[d][i][a as usize])
                        .product()
                })
                .collect()
        })
        .collect();

    // keep the final OLS over-determined: intercept + steps <= N - 1
    let max_steps = n.saturating_sub(2).min(nonzero.len());
    let path = match lar_path_impl(&rows, y, max_steps) {
        Ok(p) => p,
        Err(RegressionError::NumericalBreakdown { .. }) => crate::regression::LarPath {
            order: Vec::new(),
            breakdown: Some(0),
        },
        Err(e) => return Err(e.into()),
    };

    let mut inc = IncrementalOls::new(y.to_vec());
    if inc.add_column(&vec![1.0; n]).is_err() {
        return Ok(None);
    }
    let mut best: Option<(f64, usize)> = None; // (score, steps)
    match inc.err_loo_rel(var_y) {
        Ok(err) => {
            let score = err * inc.corrected_loo_factor(config.trace_scaling);
            best = Some((score, 0));
        }
        Err(RegressionError::LeverageOne { .. }) => {}
        Err(e) => return Err(e.into()),
    }
    for (steps, &j) in path.order.iter().enumerate() {
        if inc.p() + 1 >= n {
            break;
        }
        let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        if inc.add_column(&col).is_err() {
            break;
        }
        match inc.err_loo_rel(var_y) {
            Ok(err) => {
                let score = err * inc.corrected_loo_factor(config.trace_scaling);
                if score.is_finite() && best.is_none_or(|(s, _)| score < s) {
                    best = Some((score, steps + 1));
                }
            }
            Err(RegressionError::LeverageOne { .. }) => break,
            Err(e) => return Err(e.into()),
        }
    }

    Ok(best.map(|(score, steps)| Candidate {
        score,
        active: path.order[..steps]
            .iter()
            .map(|&j| nonzero[j].clone())
            .collect(),
        p_t,
        q,
    }))
}

impl PceModel {
    pub fn dim(&self) -> usize {
        self.input_model.dim()
    }

    /// Evaluate the expansion at a standardized point.
    pub fn eval_standard(&self, u: &[f64]) -> Result<f64, PceError> {
        let mut acc = 0.0;
        for term in &self.terms {
            acc += term.coefficient
                * crate::ortho_poly::tensor_basis_eval(&term.alpha, u, &self.basis)?;
        }
        Ok(acc)
    }

    /// Evaluate the expansion at a physical point.
    pub fn eval_physical(&self, x: &[f64]) -> Result<f64, PceError> {
        let u = self.input_model.to_standard(x)?;
        self.eval_standard(&u)
    }

    /// Meta-model mean: the constant coefficient.
    pub fn mean(&self) -> f64 {
        self.terms
            .iter()
            .find(|t| t.alpha.is_zero())
            .map_or(0.0, |t| t.coefficient)
    }

    /// Meta-model variance: the sum of squared non-constant coefficients.
    pub fn variance(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| !t.alpha.is_zero())
            .map(|t| t.coefficient * t.coefficient)
            .sum()
    }

    fn subset_mask(&self, u: &[usize]) -> Result<Vec<bool>, PceError> {
        let m = self.dim();
        if u.is_empty() {
            return Err(PceError::InvalidSubset("empty subset".into()));
        }
        let mut mask = vec![false; m];
        for &i in u {
            if i >= m {
                return Err(PceError::InvalidSubset(format!(
                    "variable index {i} out of range for dimension {m}"
                )));
            }
            mask[i] = true;
        }
        Ok(mask)
    }

    /// First-order Sobol' index of the variable subset `u` (0-based):
    /// the variance share of terms supported inside `u`.
    pub fn sobol_first(&self, u: &[usize]) -> Result<f64, PceError> {
        let mask = self.subset_mask(u)?;
        let d = self.variance();
        if d <= 0.0 {
            return Err(PceError::ZeroVariance);
        }
        let num: f64 = self
            .terms
            .iter()
            .filter(|t| {
                !t.alpha.is_zero()
                    && t.alpha
                        .0
                        .iter()
                        .enumerate()
                        .all(|(i, &a)| a == 0 || mask[i])
            })
            .map(|t| t.coefficient * t.coefficient)
            .sum();
        Ok(num / d)
    }

    /// Total Sobol' index of the variable subset `u`: the variance share of
    /// terms touching any variable of `u`.
    pub fn sobol_total(&self, u: &[usize]) -> Result<f64, PceError> {
        let mask = self.subset_mask(u)?;
        let d = self.variance();
        if d <= 0.0 {
            return Err(PceError::ZeroVariance);
        }
        let num: f64 = self
            .terms
            .iter()
            .filter(|t| t.alpha.0.iter().enumerate().any(|(i, &a)| a > 0 && mask[i]))
            .map(|t| t.coefficient * t.coefficient)
            .sum();
        Ok(num / d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("PCE model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input_model::Marginal;
    use crate::sampling::{sobol_sequence, DesignProvenance};

    fn uniform_model(m: usize) -> InputModel {
        InputModel::new(vec![
            Marginal::UniformBounded {
                lower: 0.0,
                upper: 1.0
            };
            m
        ])
        .unwrap()
    }

    fn design_with(
        model: &InputModel,
        n: usize,
        f: impl Fn(&[f64]) -> f64,
    ) -> ExperimentalDesign {
        let pts = sobol_sequence(model.dim(), n).unwrap();
        let ed =
            ExperimentalDesign::from_unit(pts, model, DesignProvenance::SobolSequence).unwrap();
        let y: Vec<f64> = ed.points_standard.iter().map(|u| f(u)).collect();
        ed.with_responses(y).unwrap()
    }

    #[test]
    fn constant_target_gives_constant_model() {
        let model = uniform_model(3);
        let ed = design_with(&model, 20, |_| 7.5);
        let pce = build_pce(&ed, &model, &PceConfig::default()).unwrap();
        assert_eq!(pce.terms.len(), 1);
        assert!((pce.mean() - 7.5).abs() < 1e-12);
        assert!(pce.errors.err_loo_corrected_rel.unwrap() < 1e-20);
    }

    #[test]
    fn recovers_single_legendre_term() {
        let model = uniform_model(3);
        let ed = design_with(&model, 50, |u| {
            crate::ortho_poly::legendre_orthonormal(2, u[0]).unwrap()
        });
        let pce = build_pce(&ed, &model, &PceConfig::default()).unwrap();
        let target = MultiIndex(vec![2, 0, 0]);
        let coef = pce
            .terms
            .iter()
            .find(|t| t.alpha == target)
            .expect("target term selected")
            .coefficient;
        assert!((coef - 1.0).abs() < 1e-8, "coef = {coef}");
        // all other coefficients negligible
        for t in &pce.terms {
            if t.alpha != target && !t.alpha.is_zero() {
                assert!(t.coefficient.abs() < 1e-8);
            }
        }
        // evaluation at u1 = 1 gives sqrt(5) * (3 - 1) / 2 = P2 value
        let v = pce.eval_standard(&[1.0, 0.0, 0.0]).unwrap();
        assert!((v - 5.0f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn eval_is_linear_in_coefficients() {
        let model = uniform_model(2);
        let ed = design_with(&model, 30, |u| 1.0 + u[0] + 0.5 * u[1]);
        let mut pce = build_pce(&ed, &model, &PceConfig::default()).unwrap();
        let x = [0.3, 0.6];
        let v1 = pce.eval_physical(&x).unwrap();
        for t in &mut pce.terms {
            t.coefficient *= 2.0;
        }
        let v2 = pce.eval_physical(&x).unwrap();
        assert!((v2 - 2.0 * v1).abs() < 1e-12);
    }

    #[test]
    fn variance_of_single_term_is_one() {
        let model = uniform_model(2);
        let ed = design_with(&model, 40, |u| {
            crate::ortho_poly::legendre_orthonormal(2, u[0]).unwrap()
        });
        let pce = build_pce(&ed, &model, &PceConfig::default()).unwrap();
        assert!((pce.variance() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn full_subset_first_order_is_one() {
        let model = uniform_model(3);
        let ed = design_with(&model, 60, |u| u[0] + u[1] * u[2] + 0.3 * u[2]);
        let pce = build_pce(&ed, &model, &PceConfig::default()).unwrap();
        let s = pce.sobol_first(&[0, 1, 2]).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn total_equals_one_minus_complement_first() {
        let model = uniform_model(3);
        let ed = design_with(&model, 80, |u| {
            u[0] + 2.0 * u[1] + u[0] * u[1] + 0.5 * u[2] * u[2]
        });
        let pce = build_pce(&ed, &model, &PceConfig::default()).unwrap();
        for u in [vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2]] {
            let complement: Vec<usize> = (0..3).filter(|i| !u.contains(i)).collect();
            let total = pce.sobol_total(&u).unwrap();
            let first_c = pce.sobol_first(&complement).unwrap();
            assert!((total - (1.0 - first_c)).abs() < 1e-12);
        }
    }

    #[test]
    fn additive_model_total_equals_first() {
        let model = uniform_model(2);
        let ed = design_with(&model, 40, |u| 2.0 * u[0] + 3.0 * u[1]);
        let pce = build_pce(&ed, &model, &PceConfig::default()).unwrap();
        for i in 0..2 {
            let f = pce.sobol_first(&[i]).unwrap();
            let t = pce.sobol_total(&[i]).unwrap();
            assert!((f - t).abs() < 1e-10);
        }
    }

    #[test]
    fn subset_errors() {
        let model = uniform_model(2);
        let ed = design_with(&model, 30, |u| u[0]);
        let pce = build_pce(&ed, &model, &PceConfig::default()).unwrap();
        assert!(matches!(
            pce.sobol_first(&[]),
            Err(PceError::InvalidSubset(_))
        ));
        assert!(matches!(
            pce.sobol_first(&[5]),
            Err(PceError::InvalidSubset(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let model = uniform_model(2);
        let ed = design_with(&model, 30, |u| u[0] + u[1]);
        let pce = build_pce(&ed, &model, &PceConfig::default()).unwrap();
        let back = PceModel::from_json(&pce.to_json()).unwrap();
        assert_eq!(pce, back);
    }
}
