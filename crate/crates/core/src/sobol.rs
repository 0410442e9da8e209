//! Model-agnostic Sobol' machinery: Monte-Carlo pick-freeze reference
//! estimators, moment estimation, Spearman screening and the sensitivity
//! report container shared by all index providers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::input_model::{InputError, InputModel};
use crate::sampling::mix_seed;

#[derive(Debug, Error)]
pub enum SobolError {
    #[error("model evaluation failed at point {point}: {message}")]
    ModelFailure { point: usize, message: String },
    #[error("responses have zero variance")]
    ZeroVariance,
    #[error("ranks have zero variance (constant input)")]
    ZeroRankVariance,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Input(#[from] InputError),
}

/// Failure message from a black-box model evaluation.
#[derive(Debug, Clone)]
pub struct ModelError(pub String);

impl std::fmt::Display for ModelError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// A scalar-valued model evaluable at physical points.
pub trait Model {
    fn eval(&self, x: &[f64]) -> Result<f64, ModelError>;
}

impl<F> Model for F
where
    F: Fn(&[f64]) -> Result<f64, ModelError>,
{
    fn eval(&self, x: &[f64]) -> Result<f64, ModelError> {
        self(x)
    }
}

/// Estimation method behind a sensitivity report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodTag {
    LraAnalytic,
    PceAnalytic,
    McPickFreeze,
    ExactBenchmark,
}

impl MethodTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodTag::LraAnalytic => "LRA-analytic",
            MethodTag::PceAnalytic => "PCE-analytic",
            MethodTag::McPickFreeze => "MC-pick-freeze",
            MethodTag::ExactBenchmark => "exact-benchmark",
        }
    }

    /// Tolerance by which indices may overshoot [0, 1] before the report is
    /// considered corrupt (estimator noise for MC, round-off for analytic).
    pub fn index_slack(&self) -> f64 {
        match self {
            MethodTag::McPickFreeze => 0.02,
            _ => 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSensitivity {
    pub name: String,
    pub first_order: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSensitivity {
    /// 0-based variable indices of the subset.
    pub indices: Vec<usize>,
    pub first_order: f64,
    pub total: f64,
}

/// Moments and Sobol' indices of one model, with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub method: MethodTag,
    /// ED size for meta-model methods, MC sample size for estimators.
    pub sample_size: usize,
    pub mean: f64,
    pub variance: f64,
    pub variables: Vec<VariableSensitivity>,
    #[serde(default)]
    pub subsets: Vec<SubsetSensitivity>,
}

impl SensitivityReport {
    /// Check the index range invariant for this report's method.
    pub fn validate(&self) -> Result<(), SobolError> {
        let eps = self.method.index_slack();
        let ok = |v: f64| (-eps..=1.0 + eps).contains(&v);
        for v in &self.variables {
            if !ok(v.first_order) || !ok(v.total) {
                return Err(SobolError::InvalidArgument(format!(
                    "index of {} outside [-{eps}, 1+{eps}]",
                    v.name
                )));
            }
        }
        for s in &self.subsets {
            if !ok(s.first_order) || !ok(s.total) {
                return Err(SobolError::InvalidArgument(format!(
                    "subset index {:?} outside [-{eps}, 1+{eps}]",
                    s.indices
                )));
            }
        }
        Ok(())
    }
}

/// Variable order by descending total index, ties by ascending position.
pub fn rank_variables(report: &SensitivityReport) -> Vec<usize> {
    let mut order: Vec<usize> = (0..report.variables.len()).collect();
    order.sort_by(|&a, &b| {
        report.variables[b]
            .total
            .partial_cmp(&report.variables[a].total)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Monte-Carlo moments of a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McMoments {
    pub mean: f64,
    pub variance: f64,
    pub std_error_of_mean: f64,
}

/// Sample mean and unbiased variance over `n` i.i.d. draws of the input.
pub fn mc_moments(
    model: &dyn Model,
    input: &InputModel,
    n: usize,
    seed: u64,
) -> Result<McMoments, SobolError> {
    if n < 2 {
        return Err(SobolError::InvalidArgument("need n >= 2".into()));
    }
    let m = input.dim();
    let mut rng = ChaCha12Rng::seed_from_u64(mix_seed(seed, 0));
    let mut unit = vec![0.0; m];
    // Welford accumulation: single pass, no catastrophic cancellation
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    for i in 0..n {
        unit.iter_mut().for_each(|v| *v = rng.random::<f64>());
        let x = input.unit_to_physical(&unit)?;
        let y = model.eval(&x).map_err(|e| SobolError::ModelFailure {
            point: i,
            message: e.0,
        })?;
        let delta = y - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (y - mean);
    }
    let variance = m2 / (n - 1) as f64;
    Ok(McMoments {
        mean,
        variance,
        std_error_of_mean: (variance / n as f64).sqrt(),
    })
}

/// Pick-freeze estimates `(first_order, total)` for the variable subset `u`
/// (0-based).
///
/// Pairs `(Y, Y')` share the components of `u` and redraw the rest; the
/// first-order index uses the stabilized correlated-pair estimator
/// `(<YY'> - <(Y+Y')/2>^2) / (<(Y^2+Y'^2)/2> - <(Y+Y')/2>^2)`.
/// The total index is `1 - first_order(complement)` on the same two sample
/// streams, so different subsets reuse identical base draws.
pub fn pick_freeze_indices(
    model: &dyn Model,
    input: &InputModel,
    n: usize,
    u: &[usize],
    seed: u64,
) -> Result<(f64, f64), SobolError> {
    if n < 100 {
        return Err(SobolError::InvalidArgument("need n >= 100".into()));
    }
    let m = input.dim();
    if u.is_empty() {
        return Err(SobolError::InvalidArgument("empty subset".into()));
    }
    let mut in_u = vec![false; m];
    for &i in u {
        if i >= m {
            return Err(SobolError::InvalidArgument(format!(
                "variable index {i} out of range for dimension {m}"
            )));
        }
        in_u[i] = true;
    }

    let mut base_rng = ChaCha12Rng::seed_from_u64(mix_seed(seed, 1));
    let mut redraw_rng = ChaCha12Rng::seed_from_u64(mix_seed(seed, 2));

    let mut acc_first = PairAccumulator::default();
    let mut acc_comp = PairAccumulator::default();
    let mut base = vec![0.0; m];
    let mut redraw = vec![0.0; m];
    let mut mixed = vec![0.0; m];
    for i in 0..n {
        base.iter_mut().for_each(|v| *v = base_rng.random::<f64>());
        redraw
            .iter_mut()
            .for_each(|v| *v = redraw_rng.random::<f64>());

        let eval_at = |unit: &[f64], idx: usize| -> Result<f64, SobolError> {
            let x = input.unit_to_physical(unit)?;
            model.eval(&x).map_err(|e| SobolError::ModelFailure {
                point: idx,
                message: e.0,
            })
        };

        let y = eval_at(&base, i)?;
        // freeze u, redraw the complement
        for d in 0..m {
            mixed[d] = if in_u[d] { base[d] } else { redraw[d] };
        }
        let y_u = eval_at(&mixed, i)?;
        // freeze the complement, redraw u
        for d in 0..m {
            mixed[d] = if in_u[d] { redraw[d] } else { base[d] };
        }
        let y_c = eval_at(&mixed, i)?;

        acc_first.push(y, y_u);
        acc_comp.push(y, y_c);
    }

    let first = acc_first.index(n)?;
    let total = 1.0 - acc_comp.index(n)?;
    Ok((first, total))
}

// Sums for the stabilized pick-freeze estimator, accumulated in chunks so
// that results are reproducible and round-off stays controlled at n = 1e6.
#[derive(Default)]
struct PairAccumulator {
    chunks: Vec<[f64; 3]>, // sum y*y', sum (y+y')/2, sum (y^2+y'^2)/2
    current: [f64; 3],
    in_chunk: usize,
}

impl PairAccumulator {
    const CHUNK: usize = 4096;

    fn push(&mut self, y: f64, yp: f64) {
        self.current[0] += y * yp;
        self.current[1] += 0.5 * (y + yp);
        self.current[2] += 0.5 * (y * y + yp * yp);
        self.in_chunk += 1;
        if self.in_chunk == Self::CHUNK {
            self.chunks.push(self.current);
            self.current = [0.0; 3];
            self.in_chunk = 0;
        }
    }

    fn index(&self, n: usize) -> Result<f64, SobolError> {
        let mut total = self.current;
        for c in &self.chunks {
            for (t, v) in total.iter_mut().zip(c) {
                *t += v;
            }
        }
        let nf = n as f64;
        let mean_prod = total[0] / nf;
        let mean = total[1] / nf;
        let mean_sq = total[2] / nf;
        let denom = mean_sq - mean * mean;
        if denom <= 0.0 {
            return Err(SobolError::ZeroVariance);
        }
        Ok((mean_prod - mean * mean) / denom)
    }
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman_rho(x_samples: &[f64], y_samples: &[f64]) -> Result<f64, SobolError> {
    if x_samples.len() != y_samples.len() || x_samples.len() < 3 {
        return Err(SobolError::InvalidArgument(
            "need equal lengths >= 3".into(),
        ));
    }
    let rx = average_ranks(x_samples);
    let ry = average_ranks(y_samples);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(SobolError::ZeroRankVariance);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input_model::Marginal;

    fn gaussian_model(m: usize) -> InputModel {
        InputModel::new(vec![
            Marginal::Gaussian {
                mean: 0.0,
                std: 1.0
            };
            m
        ])
        .unwrap()
    }

    fn ok_model(f: impl Fn(&[f64]) -> f64) -> impl Model {
        move |x: &[f64]| Ok(f(x))
    }

    #[test]
    fn mc_moments_constant_model() {
        let input = gaussian_model(2);
        let m = mc_moments(&ok_model(|_| 3.0), &input, 1000, 1).unwrap();
        assert_eq!(m.mean, 3.0);
        assert_eq!(m.variance, 0.0);
    }

    #[test]
    fn mc_moments_standard_normal() {
        let input = gaussian_model(1);
        let n = 200_000;
        let m = mc_moments(&ok_model(|x| x[0]), &input, n, 7).unwrap();
        assert!(m.mean.abs() < 3.0 / (n as f64).sqrt() * 1.5, "mean {}", m.mean);
        assert!((m.variance - 1.0).abs() < 0.01 * 1.5, "var {}", m.variance);
    }

    #[test]
    fn mc_moments_failure_carries_point_index() {
        let input = gaussian_model(1);
        let failing = |_: &[f64]| -> Result<f64, ModelError> {
            Err(ModelError("boom".into()))
        };
        match mc_moments(&failing, &input, 10, 1) {
            Err(SobolError::ModelFailure { point: 0, message }) => {
                assert_eq!(message, "boom")
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn pick_freeze_single_variable_model() {
        let input = gaussian_model(3);
        let (first, total) =
            pick_freeze_indices(&ok_model(|x| x[0].powi(3) + x[0]), &input, 100_000, &[0], 3)
                .unwrap();
        assert!((first - 1.0).abs() < 0.02, "first {first}");
        assert!((total - 1.0).abs() < 0.02, "total {total}");
    }

    #[test]
    fn pick_freeze_symmetric_additive() {
        let input = gaussian_model(2);
        let (first, total) =
            pick_freeze_indices(&ok_model(|x| x[0] + x[1]), &input, 100_000, &[0], 5).unwrap();
        assert!((first - 0.5).abs() < 0.02, "first {first}");
        assert!((total - 0.5).abs() < 0.02, "total {total}");
    }

    #[test]
    fn pick_freeze_deterministic() {
        let input = gaussian_model(2);
        let f = |x: &[f64]| Ok(x[0] * x[0] + 0.5 * x[1]);
        let a = pick_freeze_indices(&f, &input, 2000, &[1], 9).unwrap();
        let b = pick_freeze_indices(&f, &input, 2000, &[1], 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spearman_monotone_maps() {
        let x: Vec<f64> = (0..50).map(|i| i as f64 / 10.0 - 2.5).collect();
        let y: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        assert_eq!(spearman_rho(&x, &y).unwrap(), 1.0);
        let y_neg: Vec<f64> = x.iter().map(|v| -v.powi(3)).collect();
        assert_eq!(spearman_rho(&x, &y_neg).unwrap(), -1.0);
    }

    #[test]
    fn spearman_constant_input_errors() {
        let x = vec![1.0; 10];
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert!(matches!(
            spearman_rho(&x, &y),
            Err(SobolError::ZeroRankVariance)
        ));
    }

    #[test]
    fn spearman_independent_near_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let x: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        assert!(spearman_rho(&x, &y).unwrap().abs() < 0.05);
    }

    #[test]
    fn rank_variables_ordering() {
        let report = SensitivityReport {
            method: MethodTag::ExactBenchmark,
            sample_size: 0,
            mean: 0.0,
            variance: 1.0,
            variables: vec![
                VariableSensitivity {
                    name: "a".into(),
                    first_order: 0.1,
                    total: 0.2,
                },
                VariableSensitivity {
                    name: "b".into(),
                    first_order: 0.5,
                    total: 0.6,
                },
                VariableSensitivity {
                    name: "c".into(),
                    first_order: 0.2,
                    total: 0.2,
                },
            ],
            subsets: vec![],
        };
        assert_eq!(rank_variables(&report), vec![1, 0, 2]);
    }

    #[test]
    fn report_validation_slack_depends_on_method() {
        let mut report = SensitivityReport {
            method: MethodTag::McPickFreeze,
            sample_size: 100,
            mean: 0.0,
            variance: 1.0,
            variables: vec![VariableSensitivity {
                name: "x1".into(),
                first_order: -0.01,
                total: 1.015,
            }],
            subsets: vec![],
        };
        assert!(report.validate().is_ok());
        report.method = MethodTag::LraAnalytic;
        assert!(report.validate().is_err());
    }
}
