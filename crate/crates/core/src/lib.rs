//! Multivariate epigraph/hypograph indexes and the EHyClus clustering
//! pipeline for multivariate functional data.
//!
//! The crate is organized around [`fda::MultivariateFunctionalSample`]: a set
//! of `n` curves with `p` components evaluated on a shared time grid of `m`
//! points. On top of it sit
//!
//! * [`smoothing`] — cubic B-spline least-squares fits and analytic
//!   derivative evaluation,
//! * [`indexes`] — univariate and joint multivariate epigraph/hypograph
//!   indexes, their weighted-average variants, subset indexes, and the
//!   inclusion–exclusion relation between them,
//! * [`clustering`] — hierarchical, k-means, kernel k-means and spectral
//!   clustering over index feature matrices,
//! * [`metrics`] — external validation (purity, pairwise F-measure, Rand
//!   index),
//! * [`simulate`] — seeded generators for the ds1..ds4 benchmark datasets,
//! * [`io`] — CSV/JSON readers and writers plus the bundled Canadian
//!   Weather data,
//! * [`pipeline`] — the EHyClus orchestration: smooth, differentiate, build
//!   the 15 index datasets, run the method grid, evaluate and aggregate.
//!
//! All numeric kernels are generic over the scalar type through [`Real`];
//! the aliases below fix the two supported precisions.

#![allow(clippy::needless_range_loop)]

pub mod clustering;
pub mod error;
pub mod fda;
pub mod indexes;
pub mod io;
mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod scalar;
pub mod simulate;
pub mod smoothing;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision sample, the default for the CLI and the pipeline.
pub type Sample64 = fda::MultivariateFunctionalSample<f64>;
/// Single-precision sample.
pub type Sample32 = fda::MultivariateFunctionalSample<f32>;
/// Double-precision index feature matrix.
pub type FeatureMatrix64 = clustering::FeatureMatrix<f64>;
/// Double-precision smoothed sample.
pub type SmoothedSample64 = smoothing::SmoothedSample<f64>;
