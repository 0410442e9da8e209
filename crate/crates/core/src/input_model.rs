//! Input random vector and isoprobabilistic transforms.
//!
//! The input is a vector of independent marginals. Every marginal is paired
//! with a standardized variable in which the orthonormal polynomial families
//! live: bounded uniform marginals map affinely onto `[-1, 1]` (Legendre),
//! everything else maps onto a standard normal (Hermite) by CDF matching.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normal;

/// Euler-Mascheroni constant, used by the Gumbel moment matching.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Error, PartialEq)]
pub enum InputError {
    #[error("invalid parameter for {family}: {reason}")]
    InvalidParameter {
        family: &'static str,
        reason: String,
    },
    #[error("component {index} = {value} outside the support of its marginal")]
    OutOfSupport { index: usize, value: f64 },
    #[error("transform produced a non-finite value at component {index}")]
    NonFinite { index: usize },
    #[error("point has dimension {got}, input model has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("input model must have at least one marginal")]
    Empty,
}

/// Marginal distribution of one input variable.
///
/// Lognormal and Gumbel are parameterized by mean and coefficient of
/// variation; the internal parameters are derived by moment matching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Marginal {
    UniformBounded { lower: f64, upper: f64 },
    Gaussian { mean: f64, std: f64 },
    Lognormal { mean: f64, cov: f64 },
    Gumbel { mean: f64, cov: f64 },
}

/// Standardized space a marginal is mapped to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardFamily {
    /// Uniform over `[-1, 1]`.
    Uniform,
    /// Standard normal.
    Gaussian,
}

/// Moment-matched lognormal parameters `(lambda, zeta)` of `ln X`.
///
/// `zeta = sqrt(ln(1 + cov^2))`, `lambda = ln(mean) - zeta^2 / 2`.
pub fn lognormal_params(mean: f64, cov: f64) -> Result<(f64, f64), InputError> {
    if !(mean > 0.0) || !(cov > 0.0) || !mean.is_finite() || !cov.is_finite() {
        return Err(InputError::InvalidParameter {
            family: "lognormal",
            reason: format!("requires mean > 0 and cov > 0, got mean={mean}, cov={cov}"),
        });
    }
    let zeta = (1.0 + cov * cov).ln().sqrt();
    let lambda = mean.ln() - 0.5 * zeta * zeta;
    Ok((lambda, zeta))
}

/// Moment-matched Gumbel (Type I largest value) parameters `(location, scale)`.
///
/// `scale = mean * cov * sqrt(6) / pi`, `location = mean - gamma * scale`.
pub fn gumbel_params(mean: f64, cov: f64) -> Result<(f64, f64), InputError> {
    if !(cov > 0.0) || !mean.is_finite() || !cov.is_finite() {
        return Err(InputError::InvalidParameter {
            family: "gumbel",
            reason: format!("requires cov > 0, got mean={mean}, cov={cov}"),
        });
    }
    let scale = mean.abs() * cov * 6.0f64.sqrt() / std::f64::consts::PI;
    let location = mean - EULER_GAMMA * scale;
    Ok((location, scale))
}

impl Marginal {
    pub fn validate(&self) -> Result<(), InputError> {
        match *self {
            Marginal::UniformBounded { lower, upper } => {
                if !(upper > lower) || !lower.is_finite() || !upper.is_finite() {
                    return Err(InputError::InvalidParameter {
                        family: "uniform",
                        reason: format!("requires upper > lower, got [{lower}, {upper}]"),
                    });
                }
            }
            Marginal::Gaussian { mean, std } => {
                if !(std > 0.0) || !mean.is_finite() || !std.is_finite() {
                    return Err(InputError::InvalidParameter {
                        family: "gaussian",
                        reason: format!("requires std > 0, got mean={mean}, std={std}"),
                    });
                }
            }
            Marginal::Lognormal { mean, cov } => {
                lognormal_params(mean, cov)?;
            }
            Marginal::Gumbel { mean, cov } => {
                gumbel_params(mean, cov)?;
            }
        }
        Ok(())
    }

    /// Standardized family this marginal is paired with.
    pub fn standard_family(&self) -> StandardFamily {
        match self {
            Marginal::UniformBounded { .. } => StandardFamily::Uniform,
            _ => StandardFamily::Gaussian,
        }
    }

    /// Mean of the marginal.
    pub fn mean(&self) -> f64 {
        match *self {
            Marginal::UniformBounded { lower, upper } => 0.5 * (lower + upper),
            Marginal::Gaussian { mean, .. } => mean,
            Marginal::Lognormal { mean, .. } => mean,
            Marginal::Gumbel { mean, .. } => mean,
        }
    }

    /// CDF of the marginal at `x` (0 or 1 outside the support).
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Marginal::UniformBounded { lower, upper } => {
                ((x - lower) / (upper - lower)).clamp(0.0, 1.0)
            }
            Marginal::Gaussian { mean, std } => normal::cdf((x - mean) / std),
            Marginal::Lognormal { mean, cov } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let (lambda, zeta) = lognormal_params(mean, cov).expect("validated");
                normal::cdf((x.ln() - lambda) / zeta)
            }
            Marginal::Gumbel { mean, cov } => {
                let (location, scale) = gumbel_params(mean, cov).expect("validated");
                (-(-(x - location) / scale).exp()).exp()
            }
        }
    }

    /// Quantile function of the marginal, `p` in `(0, 1)`.
    pub fn inv_cdf(&self, p: f64) -> f64 {
        match *self {
            Marginal::UniformBounded { lower, upper } => lower + (upper - lower) * p,
            Marginal::Gaussian { mean, std } => mean + std * normal::quantile(p),
            Marginal::Lognormal { mean, cov } => {
                let (lambda, zeta) = lognormal_params(mean, cov).expect("validated");
                (lambda + zeta * normal::quantile(p)).exp()
            }
            Marginal::Gumbel { mean, cov } => {
                let (location, scale) = gumbel_params(mean, cov).expect("validated");
                location - scale * (-p.ln()).ln()
            }
        }
    }

    fn in_support(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        match *self {
            Marginal::UniformBounded { lower, upper } => (lower..=upper).contains(&x),
            Marginal::Gaussian { .. } | Marginal::Gumbel { .. } => true,
            Marginal::Lognormal { .. } => x > 0.0,
        }
    }

    // Componentwise isoprobabilistic map to the standardized variable.
    fn to_standard(&self, x: f64) -> f64 {
        match *self {
            Marginal::UniformBounded { lower, upper } => {
                2.0 * (x - lower) / (upper - lower) - 1.0
            }
            Marginal::Gaussian { mean, std } => (x - mean) / std,
            Marginal::Lognormal { mean, cov } => {
                let (lambda, zeta) = lognormal_params(mean, cov).expect("validated");
                (x.ln() - lambda) / zeta
            }
            Marginal::Gumbel { .. } => normal::quantile(self.cdf(x)),
        }
    }

    fn from_standard(&self, u: f64) -> f64 {
        match *self {
            Marginal::UniformBounded { lower, upper } => {
                lower + 0.5 * (u + 1.0) * (upper - lower)
            }
            Marginal::Gaussian { mean, std } => mean + std * u,
            Marginal::Lognormal { mean, cov } => {
                let (lambda, zeta) = lognormal_params(mean, cov).expect("validated");
                (lambda + zeta * u).exp()
            }
            Marginal::Gumbel { mean, cov } => {
                let (location, scale) = gumbel_params(mean, cov).expect("validated");
                location - scale * (-normal::cdf(u).ln()).ln()
            }
        }
    }
}

/// Independent input random vector with its standardization map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputModel {
    marginals: Vec<Marginal>,
}

impl InputModel {
    pub fn new(marginals: Vec<Marginal>) -> Result<Self, InputError> {
        if marginals.is_empty() {
            return Err(InputError::Empty);
        }
        for m in &marginals {
            m.validate()?;
        }
        Ok(Self { marginals })
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginals(&self) -> &[Marginal] {
        &self.marginals
    }

    pub fn standard_families(&self) -> Vec<StandardFamily> {
        self.marginals.iter().map(|m| m.standard_family()).collect()
    }

    fn check_dim(&self, len: usize) -> Result<(), InputError> {
        if len != self.dim() {
            return Err(InputError::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    /// Map a physical point to the standardized space.
    pub fn to_standard(&self, x: &[f64]) -> Result<Vec<f64>, InputError> {
        self.check_dim(x.len())?;
        let mut u = Vec::with_capacity(x.len());
        for (i, (&xi, m)) in x.iter().zip(&self.marginals).enumerate() {
            if !m.in_support(xi) {
                return Err(InputError::OutOfSupport {
                    index: i,
                    value: xi,
                });
            }
            let ui = m.to_standard(xi);
            if !ui.is_finite() {
                return Err(InputError::NonFinite { index: i });
            }
            u.push(ui);
        }
        Ok(u)
    }

    /// Map a standardized point back to physical coordinates.
    pub fn from_standard(&self, u: &[f64]) -> Result<Vec<f64>, InputError> {
        self.check_dim(u.len())?;
        let mut x = Vec::with_capacity(u.len());
        for (i, (&ui, m)) in u.iter().zip(&self.marginals).enumerate() {
            if !ui.is_finite() {
                return Err(InputError::NonFinite { index: i });
            }
            let xi = m.from_standard(ui);
            if !xi.is_finite() {
                return Err(InputError::NonFinite { index: i });
            }
            x.push(xi);
        }
        Ok(x)
    }

    /// Map a unit-hypercube point to physical coordinates via the marginal
    /// quantile functions. Coordinates are nudged inside `(0, 1)` so that
    /// unbounded marginals stay finite.
    pub fn unit_to_physical(&self, v: &[f64]) -> Result<Vec<f64>, InputError> {
        self.check_dim(v.len())?;
        Ok(v.iter()
            .zip(&self.marginals)
            .map(|(&vi, m)| m.inv_cdf(clamp_unit(vi)))
            .collect())
    }

    /// Map a unit-hypercube point directly to the standardized space.
    pub fn unit_to_standard(&self, v: &[f64]) -> Result<Vec<f64>, InputError> {
        self.check_dim(v.len())?;
        Ok(v.iter()
            .zip(&self.marginals)
            .map(|(&vi, m)| {
                let p = clamp_unit(vi);
                match m.standard_family() {
                    StandardFamily::Uniform => 2.0 * p - 1.0,
                    StandardFamily::Gaussian => normal::quantile(p),
                }
            })
            .collect())
    }
}

fn clamp_unit(v: f64) -> f64 {
    v.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_midpoint_maps_to_center() {
        let m = InputModel::new(vec![Marginal::UniformBounded {
            lower: 0.0,
            upper: 1.0,
        }])
        .unwrap();
        assert_eq!(m.to_standard(&[0.5]).unwrap()[0], 0.0);
    }

    #[test]
    fn lognormal_median_maps_to_zero() {
        let m = InputModel::new(vec![Marginal::Lognormal {
            mean: 1.0,
            cov: 0.3,
        }])
        .unwrap();
        let (lambda, _) = lognormal_params(1.0, 0.3).unwrap();
        let u = m.to_standard(&[lambda.exp()]).unwrap()[0];
        assert!(u.abs() < 1e-12);
    }

    #[test]
    fn gumbel_median_maps_to_zero() {
        let g = Marginal::Gumbel {
            mean: 50.0,
            cov: 0.15,
        };
        let m = InputModel::new(vec![g]).unwrap();
        let median = g.inv_cdf(0.5);
        let u = m.to_standard(&[median]).unwrap()[0];
        assert!(u.abs() < 1e-9, "u = {u}");
    }

    #[test]
    fn uniform_endpoint_maps_to_endpoint() {
        let m = InputModel::new(vec![Marginal::UniformBounded {
            lower: 2.0,
            upper: 6.0,
        }])
        .unwrap();
        assert_eq!(m.from_standard(&[-1.0]).unwrap()[0], 2.0);
    }

    #[test]
    fn lognormal_params_reject_bad_input() {
        assert!(lognormal_params(1.0, 0.0).is_err());
        assert!(lognormal_params(-1.0, 0.3).is_err());
        assert!(lognormal_params(0.0, 0.3).is_err());
    }

    #[test]
    fn gumbel_params_shape() {
        let (location, scale) = gumbel_params(50.0, 0.15).unwrap();
        assert!(scale > 0.0);
        assert!(location < 50.0);
        // recomputed mean
        assert!((location + EULER_GAMMA * scale - 50.0).abs() < 1e-10);
        // recomputed cov: std = pi * scale / sqrt(6)
        let std = std::f64::consts::PI * scale / 6.0f64.sqrt();
        assert!((std / 50.0 - 0.15).abs() < 1e-12);
    }

    #[test]
    fn out_of_support_reported() {
        let m = InputModel::new(vec![Marginal::Lognormal {
            mean: 1.0,
            cov: 0.3,
        }])
        .unwrap();
        assert!(matches!(
            m.to_standard(&[-1.0]),
            Err(InputError::OutOfSupport { index: 0, .. })
        ));
    }

    #[test]
    fn dimension_mismatch_reported() {
        let m = InputModel::new(vec![Marginal::Gaussian {
            mean: 0.0,
            std: 1.0,
        }])
        .unwrap();
        assert!(matches!(
            m.to_standard(&[0.0, 1.0]),
            Err(InputError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn no_empty_model() {
        assert!(matches!(InputModel::new(vec![]), Err(InputError::Empty)));
    }
}
