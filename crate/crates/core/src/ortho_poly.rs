//! Orthonormal univariate polynomial families and tensor-product bases.
//!
//! Legendre polynomials are orthonormal under Uniform(-1, 1), probabilists'
//! Hermite polynomials under the standard normal. Multivariate basis
//! functions are products of univariate ones indexed by a multi-index, with
//! candidate sets produced by hyperbolic (q-norm) truncation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::input_model::StandardFamily;

/// Default cap on the cardinality of an enumerated truncation set.
pub const DEFAULT_TRUNCATION_CAP: usize = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum OrthoError {
    #[error("point {0} outside [-1, 1]")]
    DomainError(f64),
    #[error("multi-index degree {degree} exceeds basis maximum {max} in dimension {dim}")]
    DegreeExceeded { dim: usize, degree: u32, max: u32 },
    #[error("truncation set would exceed the cap of {cap} indices")]
    SizeOverflow { cap: usize },
    #[error("hyperbolic exponent q must lie in (0, 1], got {0}")]
    InvalidQ(f64),
}

/// Multi-index of polynomial degrees, one per input dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zeros(m: usize) -> Self {
        MultiIndex(vec![0; m])
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Dimensions with a non-zero degree.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Univariate orthonormal polynomial family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyFamily {
    Legendre,
    Hermite,
}

impl From<StandardFamily> for PolyFamily {
    fn from(f: StandardFamily) -> Self {
        match f {
            StandardFamily::Uniform => PolyFamily::Legendre,
            StandardFamily::Gaussian => PolyFamily::Hermite,
        }
    }
}

impl PolyFamily {
    /// Evaluate the orthonormal polynomial of degree `k` at `u`.
    pub fn eval(&self, k: u32, u: f64) -> Result<f64, OrthoError> {
        match self {
            PolyFamily::Legendre => legendre_orthonormal(k, u),
            PolyFamily::Hermite => Ok(hermite_orthonormal(k, u)),
        }
    }

    /// Evaluate degrees `0..=p` at `u` into a reused buffer.
    pub fn eval_all(&self, p: u32, u: f64, out: &mut Vec<f64>) -> Result<(), OrthoError> {
        out.clear();
        match self {
            PolyFamily::Legendre => {
                if u.abs() > 1.0 + 1e-12 {
                    return Err(OrthoError::DomainError(u));
                }
                let mut prev = 1.0f64;
                let mut cur = u;
                out.push(1.0);
                if p >= 1 {
                    out.push(3.0f64.sqrt() * u);
                }
                for k in 1..p {
                    let kf = k as f64;
                    let next = ((2.0 * kf + 1.0) * u * cur - kf * prev) / (kf + 1.0);
                    prev = cur;
                    cur = next;
                    out.push((2.0 * (kf + 1.0) + 1.0).sqrt() * next);
                }
            }
            PolyFamily::Hermite => {
                let mut prev = 1.0f64;
                let mut cur = u;
                let mut fact = 1.0f64;
                out.push(1.0);
                if p >= 1 {
                    out.push(u);
                }
                for k in 1..p {
                    let kf = k as f64;
                    let next = u * cur - kf * prev;
                    prev = cur;
                    cur = next;
                    fact *= kf + 1.0;
                    out.push(next / fact.sqrt());
                }
            }
        }
        Ok(())
    }
}

/// Orthonormal Legendre polynomial `sqrt(2k+1) * L_k(u)` on `[-1, 1]`.
pub fn legendre_orthonormal(k: u32, u: f64) -> Result<f64, OrthoError> {
    if u.abs() > 1.0 + 1e-12 {
        return Err(OrthoError::DomainError(u));
    }
    let mut prev = 1.0f64;
    let mut cur = u;
    if k == 0 {
        return Ok(1.0);
    }
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * u * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok((2.0 * k as f64 + 1.0).sqrt() * cur)
}

/// Orthonormal probabilists' Hermite polynomial `He_k(u) / sqrt(k!)`.
pub fn hermite_orthonormal(k: u32, u: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0f64;
    let mut cur = u;
    let mut fact = 1.0f64;
    for j in 1..k {
        let jf = j as f64;
        let next = u * cur - jf * prev;
        prev = cur;
        cur = next;
        fact *= jf + 1.0;
    }
    cur / fact.sqrt()
}

/// Per-dimension polynomial families with maximum degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub families: Vec<PolyFamily>,
    pub max_degrees: Vec<u32>,
}

impl BasisSpec {
    pub fn new(families: Vec<PolyFamily>, max_degrees: Vec<u32>) -> Self {
        assert_eq!(families.len(), max_degrees.len());
        Self {
            families,
            max_degrees,
        }
    }

    /// Common family and degree in every dimension.
    pub fn uniform(family: PolyFamily, m: usize, p: u32) -> Self {
        Self {
            families: vec![family; m],
            max_degrees: vec![p; m],
        }
    }

    /// Families matched to an input model's standardized spaces.
    pub fn for_input(families: &[StandardFamily], degrees: Vec<u32>) -> Self {
        Self {
            families: families.iter().map(|&f| f.into()).collect(),
            max_degrees: degrees,
        }
    }

    pub fn dim(&self) -> usize {
        self.families.len()
    }
}

/// Evaluate the tensor-product basis function `Psi_alpha` at a standardized point.
pub fn tensor_basis_eval(
    alpha: &MultiIndex,
    u: &[f64],
    spec: &BasisSpec,
) -> Result<f64, OrthoError> {
    assert_eq!(alpha.0.len(), u.len());
    assert_eq!(alpha.0.len(), spec.dim());
    let mut prod = 1.0;
    for (i, (&a, &ui)) in alpha.0.iter().zip(u).enumerate() {
        if a > spec.max_degrees[i] {
            return Err(OrthoError::DegreeExceeded {
                dim: i,
                degree: a,
                max: spec.max_degrees[i],
            });
        }
        prod *= spec.families[i].eval(a, ui)?;
    }
    Ok(prod)
}

/// Enumerate the hyperbolic truncation set `{alpha : ||alpha||_q <= p_t}`.
///
/// For `q = 1` this is the total-degree set of cardinality `C(M + p_t, p_t)`.
/// Indices are returned sorted by total degree, then lexicographically.
pub fn truncation_set(m: usize, p_t: u32, q: f64) -> Result<Vec<MultiIndex>, OrthoError> {
    truncation_set_capped(m, p_t, q, DEFAULT_TRUNCATION_CAP)
}

/// [`truncation_set`] with an explicit cap on the enumerated cardinality.
pub fn truncation_set_capped(
    m: usize,
    p_t: u32,
    q: f64,
    cap: usize,
) -> Result<Vec<MultiIndex>, OrthoError> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(OrthoError::InvalidQ(q));
    }
    // ||alpha||_q <= p_t  <=>  sum alpha_i^q <= p_t^q
    let budget = (p_t as f64).powf(q) * (1.0 + 1e-12) + 1e-12;
    let mut out = Vec::new();
    let mut alpha = vec![0u32; m];
    dfs(m, p_t, q, budget, 0, 0.0, &mut alpha, &mut out, cap)?;
    out.sort_by(|a, b| {
        a.total_degree()
            .cmp(&b.total_degree())
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(out)
}

// Depth-first enumeration with pruning on the partial q-norm, so the full
// total-degree hypercube is never materialized.
#[allow(clippy::too_many_arguments)]
fn dfs(
    m: usize,
    p_t: u32,
    q: f64,
    budget: f64,
    dim: usize,
    partial: f64,
    alpha: &mut Vec<u32>,
    out: &mut Vec<MultiIndex>,
    cap: usize,
) -> Result<(), OrthoError> {
    if dim == m {
        if out.len() >= cap {
            return Err(OrthoError::SizeOverflow { cap });
        }
        out.push(MultiIndex(alpha.clone()));
        return Ok(());
    }
    for a in 0..=p_t {
        let contrib = if a == 0 { 0.0 } else { (a as f64).powf(q) };
        if partial + contrib > budget {
            break;
        }
        alpha[dim] = a;
        dfs(m, p_t, q, budget, dim + 1, partial + contrib, alpha, out, cap)?;
    }
    alpha[dim] = 0;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_basics() {
        assert_eq!(legendre_orthonormal(0, 0.3).unwrap(), 1.0);
        let v = legendre_orthonormal(1, 1.0).unwrap();
        assert!((v - 3.0f64.sqrt()).abs() < 1e-14);
        assert!(legendre_orthonormal(2, 1.5).is_err());
    }

    #[test]
    fn hermite_basics() {
        // He_2(0) = -1, so orthonormal value is -1/sqrt(2)
        let v = hermite_orthonormal(2, 0.0);
        assert!((v + 1.0 / 2.0f64.sqrt()).abs() < 1e-14);
        // He_1(u) = u with 1! = 1
        assert_eq!(hermite_orthonormal(1, 1.7), 1.7);
    }

    #[test]
    fn eval_all_matches_single() {
        for fam in [PolyFamily::Legendre, PolyFamily::Hermite] {
            let u = 0.437;
            let mut buf = Vec::new();
            fam.eval_all(12, u, &mut buf).unwrap();
            assert_eq!(buf.len(), 13);
            for (k, &v) in buf.iter().enumerate() {
                let single = fam.eval(k as u32, u).unwrap();
                assert!((v - single).abs() < 1e-12, "family {fam:?} degree {k}");
            }
        }
    }

    #[test]
    fn recurrence_stays_finite_to_degree_30() {
        for &u in &[-1.0, -0.5, 0.0, 0.999, 1.0] {
            assert!(legendre_orthonormal(30, u).unwrap().is_finite());
        }
        for &u in &[-8.0, -1.0, 0.0, 3.0, 8.0] {
            assert!(hermite_orthonormal(30, u).is_finite());
        }
    }

    #[test]
    fn tensor_eval_cases() {
        let spec = BasisSpec::uniform(PolyFamily::Legendre, 2, 3);
        let zero = MultiIndex::zeros(2);
        assert_eq!(tensor_basis_eval(&zero, &[0.2, -0.7], &spec).unwrap(), 1.0);
        let a = MultiIndex(vec![1, 1]);
        let v = tensor_basis_eval(&a, &[1.0, 1.0], &spec).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
        let too_high = MultiIndex(vec![4, 0]);
        assert!(matches!(
            tensor_basis_eval(&too_high, &[0.0, 0.0], &spec),
            Err(OrthoError::DegreeExceeded { dim: 0, .. })
        ));
    }

    fn binomial(n: u64, k: u64) -> u64 {
        let k = k.min(n - k);
        let mut r = 1u64;
        for i in 0..k {
            r = r * (n - i) / (i + 1);
        }
        r
    }

    #[test]
    fn total_degree_cardinality() {
        let set = truncation_set(2, 2, 1.0).unwrap();
        assert_eq!(set.len(), 6);
        let set = truncation_set(20, 3, 1.0).unwrap();
        assert_eq!(set.len(), 1771);
        for (m, p) in [(3usize, 4u32), (5, 3), (7, 2)] {
            let set = truncation_set(m, p, 1.0).unwrap();
            assert_eq!(
                set.len() as u64,
                binomial((m as u64) + (p as u64), p as u64),
                "M={m}, p={p}"
            );
        }
    }

    #[test]
    fn hyperbolic_excludes_interactions() {
        let set = truncation_set(2, 2, 0.5).unwrap();
        // (1,1) has ||.||_0.5 = (1+1)^2 = 4 > 2; the five axis terms remain
        assert_eq!(set.len(), 5);
        assert!(!set.contains(&MultiIndex(vec![1, 1])));
        assert!(set.contains(&MultiIndex(vec![2, 0])));
        assert!(set.contains(&MultiIndex(vec![0, 2])));
    }

    #[test]
    fn truncation_nested_in_q() {
        let small = truncation_set(3, 4, 0.4).unwrap();
        let big = truncation_set(3, 4, 0.9).unwrap();
        for a in &small {
            assert!(big.contains(a));
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            truncation_set_capped(6, 8, 1.0, 100),
            Err(OrthoError::SizeOverflow { cap: 100 })
        ));
    }

    #[test]
    fn invalid_q_rejected() {
        assert!(truncation_set(2, 2, 0.0).is_err());
        assert!(truncation_set(2, 2, 1.5).is_err());
    }
}
