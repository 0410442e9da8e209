//! Meta-model based global sensitivity analysis.
//!
//! This crate builds two kinds of polynomial surrogates of a black-box model
//! from a small experimental design, and computes Sobol' sensitivity indices
//! in closed form from the fitted coefficients:
//!
//! - **Canonical low-rank approximations (LRA)**: a sum of `R` rank-one terms,
//!   each a product of univariate polynomial expansions per input dimension,
//!   fitted greedily with alternated least squares ([`lra`]).
//! - **Sparse polynomial chaos expansions (PCE)**: an expansion on an
//!   orthonormal multivariate polynomial basis, selected by hybrid
//!   least-angle regression ([`pce`]).
//!
//! Supporting machinery: isoprobabilistic input transforms ([`input_model`]),
//! quasi-random and Latin-hypercube experimental designs ([`sampling`]),
//! orthonormal polynomial families ([`ortho_poly`]), least-squares and
//! cross-validation error estimation ([`regression`]), Monte-Carlo reference
//! estimators ([`sobol`]) and a registry of benchmark models with exact
//! references ([`benchmarks`]).

pub mod benchmarks;
pub mod input_model;
pub mod lra;
mod normal;
pub mod ortho_poly;
pub mod pce;
pub mod regression;
pub mod sampling;
pub mod sobol;

pub use input_model::{InputModel, Marginal};
pub use lra::LraModel;
pub use pce::PceModel;
pub use regression::ErrorReport;
pub use sampling::ExperimentalDesign;
pub use sobol::SensitivityReport;
