//! Benchmark models with exact references where they exist: the Sobol
//! g-function (analytical indices), a simply supported beam (closed-form
//! lognormal moments), a 23-bar planar truss solved by the direct stiffness
//! method, and the EOLE spectral discretization of a lognormal conductivity
//! random field.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::input_model::{lognormal_params, InputError, InputModel, Marginal};
use crate::sobol::{Model, ModelError};

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("input {index} = {value} outside the model support")]
    OutOfSupport { index: usize, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("stiffness matrix is singular for the given parameters")]
    SingularStiffness,
    #[error("eigendecomposition of the correlation matrix failed")]
    EigenFailure,
    #[error("unknown benchmark '{0}' (try `sobol-g`, `beam`, `truss`, `eole-field`)")]
    UnknownBenchmark(String),
    #[error(transparent)]
    Input(#[from] InputError),
}

// ---------------------------------------------------------------------------
// Sobol g-function
// ---------------------------------------------------------------------------

/// The Sobol g-function `prod_i (|4 x_i - 2| + c_i) / (1 + c_i)` on `[0,1]^M`.
pub fn sobol_function(x: &[f64], c: &[f64]) -> Result<f64, BenchmarkError> {
    if x.len() != c.len() {
        return Err(BenchmarkError::InvalidParameter(format!(
            "point dimension {} does not match {} constants",
            x.len(),
            c.len()
        )));
    }
    let mut prod = 1.0;
    for (i, (&xi, &ci)) in x.iter().zip(c).enumerate() {
        if !(0.0..=1.0).contains(&xi) {
            return Err(BenchmarkError::OutOfSupport {
                index: i,
                value: xi,
            });
        }
        prod *= ((4.0 * xi - 2.0).abs() + ci) / (1.0 + ci);
    }
    Ok(prod)
}

/// The M = 20 constants used by the g-function benchmark.
pub fn sobol_g_constants() -> Vec<f64> {
    let mut c = vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];
    c.extend(std::iter::repeat(500.0).take(13));
    c
}

/// Exact moments and Sobol' indices of the g-function: partial variances
/// `D_i = 1 / (3 (1 + c_i)^2)` and total variance `D = prod (D_i + 1) - 1`.
#[derive(Debug, Clone)]
pub struct SobolGExact {
    partial: Vec<f64>,
    total_variance: f64,
}

impl SobolGExact {
    pub fn new(c: &[f64]) -> Result<Self, BenchmarkError> {
        if c.iter().any(|&ci| ci < 0.0) {
            return Err(BenchmarkError::InvalidParameter(
                "g-function constants must be non-negative".into(),
            ));
        }
        let partial: Vec<f64> = c.iter().map(|&ci| 1.0 / (3.0 * (1.0 + ci).powi(2))).collect();
        let total_variance = partial.iter().map(|d| d + 1.0).product::<f64>() - 1.0;
        Ok(Self {
            partial,
            total_variance,
        })
    }

    pub fn dim(&self) -> usize {
        self.partial.len()
    }

    pub fn mean(&self) -> f64 {
        1.0
    }

    pub fn variance(&self) -> f64 {
        self.total_variance
    }

    pub fn std(&self) -> f64 {
        self.total_variance.sqrt()
    }

    /// Partial variance of one variable.
    pub fn partial_variance(&self, i: usize) -> f64 {
        self.partial[i]
    }

    /// Interaction index `S_u = prod_{i in u} D_i / D`.
    pub fn interaction(&self, u: &[usize]) -> f64 {
        u.iter().map(|&i| self.partial[i]).product::<f64>() / self.total_variance
    }

    /// First-order index of a subset: `(prod_{i in u} (1 + D_i) - 1) / D`,
    /// the sum of the interaction indices of all non-empty subsets of `u`.
    pub fn first_order(&self, u: &[usize]) -> f64 {
        let prod: f64 = u.iter().map(|&i| 1.0 + self.partial[i]).product();
        (prod - 1.0) / self.total_variance
    }

    /// Total index via the complement identity.
    pub fn total(&self, u: &[usize]) -> f64 {
        let complement: Vec<usize> = (0..self.dim()).filter(|i| !u.contains(i)).collect();
        if complement.is_empty() {
            return 1.0;
        }
        1.0 - self.first_order(&complement)
    }
}

// ---------------------------------------------------------------------------
// Beam deflection
// ---------------------------------------------------------------------------

/// Midspan deflection `P L^3 / (4 E b h^3)` of a simply supported beam with
/// a midspan point load. SI units throughout.
pub fn beam_deflection(b: f64, h: f64, l: f64, e: f64, p: f64) -> Result<f64, BenchmarkError> {
    for (name, v) in [("b", b), ("h", h), ("L", l), ("E", e), ("P", p)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(BenchmarkError::InvalidParameter(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    Ok(p * l.powi(3) / (4.0 * e * b * h.powi(3)))
}

/// Marginals of the beam benchmark, SI units, in the order (b, h, L, E, P).
pub fn beam_marginals() -> Vec<Marginal> {
    vec![
        Marginal::Lognormal {
            mean: 0.15,
            cov: 0.05,
        },
        Marginal::Lognormal {
            mean: 0.3,
            cov: 0.05,
        },
        Marginal::Lognormal {
            mean: 5.0,
            cov: 0.01,
        },
        Marginal::Lognormal {
            mean: 3.0e10,
            cov: 0.15,
        },
        Marginal::Lognormal {
            mean: 1.0e4,
            cov: 0.20,
        },
    ]
}

/// Exact moments of the beam deflection: a product of lognormals is
/// lognormal with `lambda_U = lambda_P + 3 lambda_L - ln 4 - lambda_E -
/// lambda_b - 3 lambda_h` and `zeta_U^2 = zeta_P^2 + 9 zeta_L^2 + zeta_E^2 +
/// zeta_b^2 + 9 zeta_h^2`. Returns `(mean, std)` in meters.
pub fn beam_exact_moments(marginals: &[Marginal]) -> Result<(f64, f64), BenchmarkError> {
    if marginals.len() != 5 {
        return Err(BenchmarkError::InvalidParameter(
            "beam takes 5 marginals (b, h, L, E, P)".into(),
        ));
    }
    let mut params = Vec::with_capacity(5);
    for m in marginals {
        match m {
            Marginal::Lognormal { mean, cov } => params.push(lognormal_params(*mean, *cov)?),
            other => {
                return Err(BenchmarkError::InvalidParameter(format!(
                    "beam marginals must be lognormal, got {other:?}"
                )))
            }
        }
    }
    let (lb, zb) = params[0];
    let (lh, zh) = params[1];
    let (ll, zl) = params[2];
    let (le, ze) = params[3];
    let (lp, zp) = params[4];
    let lambda = lp + 3.0 * ll - 4.0f64.ln() - le - lb - 3.0 * lh;
    let zeta2 = zp * zp + 9.0 * zl * zl + ze * ze + zb * zb + 9.0 * zh * zh;
    let mean = (lambda + 0.5 * zeta2).exp();
    let std = mean * (zeta2.exp_m1()).sqrt();
    Ok((mean, std))
}

// ---------------------------------------------------------------------------
// 23-bar truss
// ---------------------------------------------------------------------------

// Node layout: 7 bottom-chord nodes at y = 0, x = 0, 4, ..., 24 m and
// 6 top-chord nodes at y = 2, x = 2, 6, ..., 22 m. Bars: 6 bottom chords,
// 5 top chords (the 11 horizontal bars share A1, E1) and 12 diagonals
// (sharing A2, E2). Pinned at the bottom-left corner, vertical roller at
// the bottom-right corner; loads act downward on the six top-chord nodes.
const TRUSS_BAY: f64 = 4.0;
const TRUSS_HEIGHT: f64 = 2.0;

fn truss_nodes() -> Vec<(f64, f64)> {
    let mut nodes: Vec<(f64, f64)> = (0..7).map(|i| (TRUSS_BAY * i as f64, 0.0)).collect();
    nodes.extend((0..6).map(|i| (TRUSS_BAY / 2.0 + TRUSS_BAY * i as f64, TRUSS_HEIGHT)));
    nodes
}

fn truss_bars() -> Vec<(usize, usize, bool)> {
    // (node a, node b, is_horizontal)
    let mut bars = Vec::with_capacity(23);
    for i in 0..6 {
        bars.push((i, i + 1, true));
    }
    for i in 0..5 {
        bars.push((7 + i, 7 + i + 1, true));
    }
    for i in 0..6 {
        bars.push((7 + i, i, false));
        bars.push((7 + i, i + 1, false));
    }
    bars
}

/// Midspan deflection of the 23-bar truss (positive downward, meters).
///
/// `a1`, `e1` are the section and modulus of the horizontal bars, `a2`,
/// `e2` of the diagonals; `loads` are the six downward top-chord loads.
pub fn truss_deflection(
    a1: f64,
    a2: f64,
    e1: f64,
    e2: f64,
    loads: &[f64; 6],
) -> Result<f64, BenchmarkError> {
    for (name, v) in [("A1", a1), ("A2", a2), ("E1", e1), ("E2", e2)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(BenchmarkError::InvalidParameter(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    let nodes = truss_nodes();
    let ndof = 2 * nodes.len();
    let mut k = DMatrix::<f64>::zeros(ndof, ndof);
    for (a, b, horizontal) in truss_bars() {
        let (xa, ya) = nodes[a];
        let (xb, yb) = nodes[b];
        let len = ((xb - xa).powi(2) + (yb - ya).powi(2)).sqrt();
        let c = (xb - xa) / len;
        let s = (yb - ya) / len;
        let ea = if horizontal { e1 * a1 } else { e2 * a2 };
        let kl = ea / len;
        let local = [
            [c * c, c * s, -c * c, -c * s],
            [c * s, s * s, -c * s, -s * s],
            [-c * c, -c * s, c * c, c * s],
            [-c * s, -s * s, c * s, s * s],
        ];
        let dofs = [2 * a, 2 * a + 1, 2 * b, 2 * b + 1];
        for (i, &di) in dofs.iter().enumerate() {
            for (j, &dj) in dofs.iter().enumerate() {
                k[(di, dj)] += kl * local[i][j];
            }
        }
    }

    let mut f = DVector::<f64>::zeros(ndof);
    for (i, &p) in loads.iter().enumerate() {
        f[2 * (7 + i) + 1] = -p;
    }

    // pin at node 0, vertical roller at node 6
    let fixed = [0usize, 1, 2 * 6 + 1];
    let free: Vec<usize> = (0..ndof).filter(|d| !fixed.contains(d)).collect();
    let k_red = DMatrix::<f64>::from_fn(free.len(), free.len(), |i, j| k[(free[i], free[j])]);
    let f_red = DVector::<f64>::from_fn(free.len(), |i, _| f[free[i]]);
    let chol = k_red.cholesky().ok_or(BenchmarkError::SingularStiffness)?;
    let d = chol.solve(&f_red);

    // bottom-chord midspan node (x = 12 m) is node 3; its vertical dof
    let dof_v = free
        .iter()
        .position(|&dofi| dofi == 2 * 3 + 1)
        .expect("midspan dof is free");
    Ok(-d[dof_v])
}

/// Marginals of the truss benchmark, SI units, in the order
/// (A1, A2, E1, E2, P1..P6).
pub fn truss_marginals() -> Vec<Marginal> {
    let mut m = vec![
        Marginal::Lognormal {
            mean: 2.0e-3,
            cov: 0.10,
        },
        Marginal::Lognormal {
            mean: 1.0e-3,
            cov: 0.10,
        },
        Marginal::Lognormal {
            mean: 2.1e11,
            cov: 0.10,
        },
        Marginal::Lognormal {
            mean: 2.1e11,
            cov: 0.10,
        },
    ];
    m.extend(std::iter::repeat(Marginal::Gumbel {
        mean: 5.0e4,
        cov: 0.15,
    }).take(6));
    m
}

// ---------------------------------------------------------------------------
// EOLE random-field discretization
// ---------------------------------------------------------------------------

/// Square grid over the unit square `[0,1]^2` with `n_side` points per side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub n_side: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<[f64; 2]> {
        let n = self.n_side;
        let step = if n > 1 { 1.0 / (n - 1) as f64 } else { 0.0 };
        let mut pts = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                pts.push([i as f64 * step, j as f64 * step]);
            }
        }
        pts
    }
}

/// Retained EOLE eigenpairs of a squared-exponential correlation kernel on a
/// grid.
#[derive(Debug, Clone)]
pub struct EoleBasis {
    pub grid_points: Vec<[f64; 2]>,
    pub correlation_length: f64,
    /// Retained eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Retained eigenvectors, one per eigenvalue, each of grid size.
    pub eigenvectors: Vec<Vec<f64>>,
    /// Trace of the full correlation matrix (= number of grid points).
    pub total_variance: f64,
    /// Number of retained terms.
    pub retained: usize,
}

/// Spectral decomposition of the correlation matrix
/// `rho(z, z') = exp(-||z - z'||^2 / ell^2)` on the grid, truncated at the
/// smallest `M` with `sum_1^M l_i / sum_1^n l_i >= threshold`.
pub fn eole_basis(
    grid: &GridSpec,
    correlation_length: f64,
    threshold: f64,
) -> Result<EoleBasis, BenchmarkError> {
    if !(correlation_length > 0.0) {
        return Err(BenchmarkError::InvalidParameter(
            "correlation length must be positive".into(),
        ));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(BenchmarkError::InvalidParameter(
            "threshold must lie in (0, 1)".into(),
        ));
    }
    let pts = grid.points();
    let n = pts.len();
    if n < 2 {
        return Err(BenchmarkError::InvalidParameter(
            "grid needs at least 2 points".into(),
        ));
    }
    let ell2 = correlation_length * correlation_length;
    let c = DMatrix::<f64>::from_fn(n, n, |i, j| {
        let dx = pts[i][0] - pts[j][0];
        let dy = pts[i][1] - pts[j][1];
        (-(dx * dx + dy * dy) / ell2).exp()
    });
    let eig = c
        .try_symmetric_eigen(1e-13, 10_000)
        .ok_or(BenchmarkError::EigenFailure)?;

    let mut pairs: Vec<(f64, Vec<f64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            // clamp spectral round-off; the kernel is positive definite
            let l = if l > -1e-10 { l.max(0.0) } else { l };
            (l, eig.eigenvectors.column(k).iter().copied().collect())
        })
        .collect();
    if pairs.iter().any(|(l, _)| *l < 0.0) {
        return Err(BenchmarkError::EigenFailure);
    }
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let total: f64 = pairs.iter().map(|(l, _)| l).sum();
    let mut cum = 0.0;
    let mut retained = pairs.len();
    for (k, (l, _)) in pairs.iter().enumerate() {
        cum += l;
        if cum / total >= threshold {
            retained = k + 1;
            break;
        }
    }
    pairs.truncate(retained);

    let (eigenvalues, eigenvectors): (Vec<f64>, Vec<Vec<f64>>) = pairs.into_iter().unzip();
    Ok(EoleBasis {
        grid_points: pts,
        correlation_length,
        eigenvalues,
        eigenvectors,
        total_variance: total,
        retained,
    })
}

/// Evaluate the EOLE approximation of the standard Gaussian field at `z`:
/// `g(z) = sum_i (xi_i / sqrt(l_i)) phi_i^T C_z`.
pub fn eole_field_eval(basis: &EoleBasis, xi: &[f64], z: [f64; 2]) -> f64 {
    assert_eq!(xi.len(), basis.retained, "xi length must match retained M");
    let ell2 = basis.correlation_length * basis.correlation_length;
    let c_z: Vec<f64> = basis
        .grid_points
        .iter()
        .map(|p| {
            let dx = z[0] - p[0];
            let dy = z[1] - p[1];
            (-(dx * dx + dy * dy) / ell2).exp()
        })
        .collect();
    let mut g = 0.0;
    for ((l, phi), &x) in basis
        .eigenvalues
        .iter()
        .zip(&basis.eigenvectors)
        .zip(xi)
    {
        let proj: f64 = phi.iter().zip(&c_z).map(|(a, b)| a * b).sum();
        g += x / l.sqrt() * proj;
    }
    g
}

/// Lognormal conductivity wrapper `kappa = exp(a + b g)` with moments
/// matched to mean 1 and standard deviation 0.3.
pub fn kappa_field_eval(basis: &EoleBasis, xi: &[f64], z: [f64; 2]) -> f64 {
    let (a, b) = lognormal_params(1.0, 0.3).expect("fixed parameters are valid");
    (a + b * eole_field_eval(basis, xi, z)).exp()
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

/// Exact reference statistics of a benchmark, where known in closed form.
#[derive(Debug, Clone)]
pub struct ExactReference {
    pub mean: f64,
    pub std: f64,
    /// Per-variable first-order indices, when analytic.
    pub first_order: Option<Vec<f64>>,
    /// Per-variable total indices, when analytic.
    pub total: Option<Vec<f64>>,
}

enum Evaluator {
    SobolG(Vec<f64>),
    Beam,
    Truss,
    EoleField { basis: EoleBasis, probe: [f64; 2] },
}

/// A registered benchmark: named input model plus evaluator and exact
/// references where available.
pub struct BenchmarkModel {
    pub name: &'static str,
    pub description: &'static str,
    pub variable_names: Vec<String>,
    pub input_model: InputModel,
    pub exact: Option<ExactReference>,
    evaluator: Evaluator,
}

impl BenchmarkModel {
    pub fn eval(&self, x: &[f64]) -> Result<f64, BenchmarkError> {
        match &self.evaluator {
            Evaluator::SobolG(c) => sobol_function(x, c),
            Evaluator::Beam => beam_deflection(x[0], x[1], x[2], x[3], x[4]),
            Evaluator::Truss => {
                let loads: [f64; 6] = x[4..10].try_into().expect("10 inputs");
                truss_deflection(x[0], x[1], x[2], x[3], &loads)
            }
            Evaluator::EoleField { basis, probe } => Ok(kappa_field_eval(basis, x, *probe)),
        }
    }
}

impl Model for BenchmarkModel {
    fn eval(&self, x: &[f64]) -> Result<f64, ModelError> {
        BenchmarkModel::eval(self, x).map_err(|e| ModelError(e.to_string()))
    }
}

/// All registered benchmark names.
pub fn registry_names() -> Vec<&'static str> {
    vec!["sobol-g", "beam", "truss", "eole-field"]
}

/// Look a benchmark up by registry name.
pub fn get(name: &str) -> Result<BenchmarkModel, BenchmarkError> {
    match name {
        "sobol-g" => {
            let c = sobol_g_constants();
            let exact = SobolGExact::new(&c)?;
            let m = c.len();
            let first: Vec<f64> = (0..m).map(|i| exact.first_order(&[i])).collect();
            let total: Vec<f64> = (0..m).map(|i| exact.total(&[i])).collect();
            Ok(BenchmarkModel {
                name: "sobol-g",
                description: "Sobol g-function, M = 20, uniform inputs on [0, 1]",
                variable_names: (1..=m).map(|i| format!("X{i}")).collect(),
                input_model: InputModel::new(vec![
                    Marginal::UniformBounded {
                        lower: 0.0,
                        upper: 1.0
                    };
                    m
                ])?,
                exact: Some(ExactReference {
                    mean: exact.mean(),
                    std: exact.std(),
                    first_order: Some(first),
                    total: Some(total),
                }),
                evaluator: Evaluator::SobolG(c),
            })
        }
        "beam" => {
            let marginals = beam_marginals();
            let (mean, std) = beam_exact_moments(&marginals)?;
            Ok(BenchmarkModel {
                name: "beam",
                description: "simply supported beam midspan deflection (meters)",
                variable_names: ["b", "h", "L", "E", "P"].map(String::from).to_vec(),
                input_model: InputModel::new(marginals)?,
                exact: Some(ExactReference {
                    mean,
                    std,
                    first_order: None,
                    total: None,
                }),
                evaluator: Evaluator::Beam,
            })
        }
        "truss" => {
            let mut names: Vec<String> = ["A1", "A2", "E1", "E2"].map(String::from).to_vec();
            names.extend((1..=6).map(|i| format!("P{i}")));
            Ok(BenchmarkModel {
                name: "truss",
                description: "23-bar planar truss midspan deflection (meters)",
                variable_names: names,
                input_model: InputModel::new(truss_marginals())?,
                exact: None,
                evaluator: Evaluator::Truss,
            })
        }
        "eole-field" => {
            let basis = eole_basis(&GridSpec { n_side: 11 }, 0.2, 0.99)?;
            let m = basis.retained;
            Ok(BenchmarkModel {
                name: "eole-field",
                description:
                    "lognormal conductivity field at the domain center, EOLE discretized",
                variable_names: (1..=m).map(|i| format!("xi{i}")).collect(),
                input_model: InputModel::new(vec![
                    Marginal::Gaussian {
                        mean: 0.0,
                        std: 1.0
                    };
                    m
                ])?,
                exact: None,
                evaluator: Evaluator::EoleField {
                    basis,
                    probe: [0.5, 0.5],
                },
            })
        }
        other => Err(BenchmarkError::UnknownBenchmark(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_function_midpoint() {
        let c = [1.0, 2.0];
        // |4 * 0.5 - 2| = 0: product of c_i / (1 + c_i)
        let v = sobol_function(&[0.5, 0.5], &c).unwrap();
        assert!((v - 0.5 * (2.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn g_function_corner() {
        let v = sobol_function(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn g_function_support() {
        assert!(matches!(
            sobol_function(&[1.2, 0.5], &[1.0, 1.0]),
            Err(BenchmarkError::OutOfSupport { index: 0, .. })
        ));
    }

    #[test]
    fn g_exact_partial_variance() {
        let e = SobolGExact::new(&[1.0]).unwrap();
        assert!((e.partial_variance(0) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn g_exact_closure_small_m() {
        // interaction indices over all non-empty subsets sum to 1
        let e = SobolGExact::new(&[1.0, 2.0, 5.0, 10.0]).unwrap();
        let m = 4;
        let mut sum = 0.0;
        for mask in 1u32..(1 << m) {
            let u: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            sum += e.interaction(&u);
        }
        assert!((sum - 1.0).abs() < 1e-12, "sum = {sum}");
    }

    #[test]
    fn beam_mean_parameters() {
        let u = beam_deflection(0.15, 0.3, 5.0, 3.0e10, 1.0e4).unwrap();
        assert!((u - 2.572e-3).abs() < 5e-6, "u = {u}");
    }

    #[test]
    fn beam_scalings() {
        let u = beam_deflection(0.15, 0.3, 5.0, 3.0e10, 1.0e4).unwrap();
        let u2 = beam_deflection(0.15, 0.3, 5.0, 3.0e10, 2.0e4).unwrap();
        assert!((u2 / u - 2.0).abs() < 1e-12);
        let u8 = beam_deflection(0.15, 0.6, 5.0, 3.0e10, 1.0e4).unwrap();
        assert!((u / u8 - 8.0).abs() < 1e-12);
    }

    #[test]
    fn beam_rejects_nonpositive() {
        assert!(beam_deflection(0.0, 0.3, 5.0, 3.0e10, 1.0e4).is_err());
    }

    #[test]
    fn beam_moments_limit_of_vanishing_cov() {
        let tiny = 1e-8;
        let marginals: Vec<Marginal> = [
            (0.15, tiny),
            (0.3, tiny),
            (5.0, tiny),
            (3.0e10, tiny),
            (1.0e4, tiny),
        ]
        .iter()
        .map(|&(mean, cov)| Marginal::Lognormal { mean, cov })
        .collect();
        let (mean, std) = beam_exact_moments(&marginals).unwrap();
        let det = beam_deflection(0.15, 0.3, 5.0, 3.0e10, 1.0e4).unwrap();
        assert!((mean - det).abs() / det < 1e-16 * 1e10);
        assert!(std / mean < 1e-7);
    }

    #[test]
    fn truss_linearity_in_loads() {
        let loads = [5.0e4; 6];
        let u = truss_deflection(2.0e-3, 1.0e-3, 2.1e11, 2.1e11, &loads).unwrap();
        let loads2 = [1.0e5; 6];
        let u2 = truss_deflection(2.0e-3, 1.0e-3, 2.1e11, 2.1e11, &loads2).unwrap();
        assert!((u2 / u - 2.0).abs() < 1e-12);
    }

    #[test]
    fn truss_stiffness_proportionality() {
        let loads = [5.0e4; 6];
        let u = truss_deflection(2.0e-3, 1.0e-3, 2.1e11, 2.1e11, &loads).unwrap();
        let u_e = truss_deflection(2.0e-3, 1.0e-3, 4.2e11, 4.2e11, &loads).unwrap();
        assert!((u / u_e - 2.0).abs() < 1e-10);
        let u_a = truss_deflection(4.0e-3, 2.0e-3, 2.1e11, 2.1e11, &loads).unwrap();
        assert!((u / u_a - 2.0).abs() < 1e-10);
    }

    #[test]
    fn truss_mean_parameter_deflection() {
        let u = truss_deflection(2.0e-3, 1.0e-3, 2.1e11, 2.1e11, &[5.0e4; 6]).unwrap();
        // positive downward, about 7.8 cm at mean parameters
        assert!(u > 0.07 && u < 0.09, "u = {u}");
    }

    #[test]
    fn eole_trace_identity() {
        let basis = eole_basis(&GridSpec { n_side: 5 }, 0.4, 0.9).unwrap();
        assert!((basis.total_variance - 25.0).abs() < 1e-9);
    }

    #[test]
    fn eole_fully_correlated_limit() {
        let basis = eole_basis(&GridSpec { n_side: 5 }, 1e4, 0.9).unwrap();
        assert_eq!(basis.retained, 1);
        assert!((basis.eigenvalues[0] - 25.0).abs() < 1e-6);
    }

    #[test]
    fn eole_zero_xi_gives_median_kappa() {
        let basis = eole_basis(&GridSpec { n_side: 5 }, 0.4, 0.9).unwrap();
        let xi = vec![0.0; basis.retained];
        let g = eole_field_eval(&basis, &xi, [0.3, 0.7]);
        assert_eq!(g, 0.0);
        let kappa = kappa_field_eval(&basis, &xi, [0.3, 0.7]);
        let (a, _) = lognormal_params(1.0, 0.3).unwrap();
        assert!((kappa - a.exp()).abs() < 1e-15);
    }

    #[test]
    fn registry_exposes_all_models() {
        for name in registry_names() {
            let b = get(name).unwrap();
            assert_eq!(b.variable_names.len(), b.input_model.dim());
            let x: Vec<f64> = b
                .input_model
                .marginals()
                .iter()
                .map(|m| m.inv_cdf(0.5))
                .collect();
            let y = b.eval(&x).unwrap();
            assert!(y.is_finite());
        }
        assert!(matches!(
            get("nope"),
            Err(BenchmarkError::UnknownBenchmark(_))
        ));
    }
}
