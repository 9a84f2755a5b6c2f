//! Core numerics for the generalized genetic random field (GGRF) test.
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO. File formats,
//! the parallel simulation harness and the command line live in the `ggrf`
//! companion crate.
//!
//! A region-level test runs the following pipeline:
//!
//! 1. drop monomorphic variants and mean-impute missing dosages ([`data`]),
//! 2. compute per-variant weights from MAFs ([`weights`]),
//! 3. build the p-norm distance similarity, optionally double-centered ([`similarity`]),
//! 4. fit the covariate-only null model ([`null_model`]),
//! 5. estimate γ and evaluate `P(r'(S - γS²)r > 0)` as a chi-square mixture
//!    tail probability ([`engine`], [`mixture`]).
//!
//! Burden and kernel score comparators share steps 1, 2 and 4 ([`comparators`]).
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod comparators;
pub mod data;
pub mod engine;
mod error;
pub mod linalg;
pub mod mixture;
pub mod null_model;
pub mod similarity;
pub mod simulate;
pub mod special;
pub mod weights;

pub use comparators::{
    build_kernel, burden_test, kernel_score_test, ComparatorResult, KernelKind, KernelMatrix,
    KernelModel, Method as ComparatorMethod,
};
pub use data::{
    compute_maf, filter_monomorphic, impute_missing, prepare_genotypes, CovariateMatrix,
    GenotypeMatrix, PhenotypeKind, PhenotypeVector, PreparedGenotypes, VariantMeta,
};
pub use engine::{estimate_gamma, eigen_spectrum, ggrf_test, test_matrix, GgrfModel, GgrfResult};
pub use error::{Error, Result};
pub use mixture::{mc_oracle, mixture_sf, MixtureQuery, TailMethod, TailProbability};
pub use null_model::{
    fit_null, fit_null_linear, fit_null_logistic, projection_matrix, Link, NullFit,
    ProjectionMatrix,
};
pub use similarity::{
    center_similarity, nds_similarity, NormOrder, SimilarityMatrix, SimilaritySpec,
};
pub use weights::{compute_weights, WeightScheme, WeightSpec};

/// Dense column-major matrix used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;
