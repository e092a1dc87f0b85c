//! Data-dependent compression of random Fourier features.
//!
//! Start from a large draw of `J+` random Fourier features, featurize only the
//! datapoints touched by `S` sampled pairs, and greedily pick a sparse,
//! weighted subset of the features (Frank–Wolfe or GIGA) whose Gram matrix
//! tracks the full `J+`-feature Gram matrix. Plain RFM and Gaussian JL
//! compression are provided as baselines, together with ridge regression,
//! a dual coordinate descent linear SVM and kernel-PCA residuals for
//! downstream use.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the
//! experiment harness live in the `featcomp` crate.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod coreset;
pub mod downstream;
pub mod error;
pub mod features;
pub mod halton;
pub mod kernels;
pub mod linalg;
pub mod points;
pub mod rng;
pub mod special;

pub use coreset::{
    build_problem, frank_wolfe, giga, objective, sample_pairs, Compression, CoresetProblem,
    PairSample,
};
pub use downstream::{
    estimate_frobenius_error, pca_residual, ridge_fit, ridge_predict, svm_fit, svm_predict, FeatureSource,
    FrobeniusEstimate, RidgeModel, SvmModel, SvmParams,
};
pub use error::{Error, Result};
pub use features::{
    featurize, featurize_compressed, jl_project, CompressedMap, FeatureMapParams, FeatureScaling,
    JlProjection, WeightVector,
};
pub use kernels::{eval_kernel, sample_frequencies, KernelFamily, KernelSpec, SamplingKind, SamplingStrategy};
pub use linalg::Matrix;
pub use points::{Dataset, PointRef, PointSet, SparseRow};
