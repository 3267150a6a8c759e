//! Detection of Gaussian stochastic signals against a white-noise null.
//!
//! The testing problem is `H0: y ~ N(0, I)` versus `H1: y ~ N(a, M)` with a
//! positive-definite covariance `M`. The crate provides:
//!
//! - [`pdlinalg`]: symmetric positive-definite matrix primitives;
//! - [`hypotheses`]: the hypothesis-pair data model, Kullback-Leibler
//!   divergence from the null, and log-likelihood-ratio variance diagnostics;
//! - [`lrtest`]: the log likelihood-ratio statistic, threshold calibration at
//!   a target false-alarm level, and Monte Carlo / exact error estimation;
//! - [`maximalset`]: the replaceability functional `f` and the membership
//!   oracle for the maximal set of pairs that a single representative pair
//!   can stand in for without degrading the detection exponent;
//! - [`bounds`]: analytic sandwich bounds on `ln beta(alpha)` and the
//!   quantile-gap term `mu0` that controls the upper bound;
//! - [`scenarios`]: reproducible experiment sweeps emitting CSV.
//!
//! All probabilities that decay exponentially in the dimension are carried in
//! log scale (nats). Monte Carlo routines are deterministic for a fixed
//! `(seed, n_samples)` regardless of worker count.

pub mod bounds;
pub mod error;
pub mod hypotheses;
pub mod lrtest;
pub mod maximalset;
pub mod mc;
pub mod pdlinalg;
pub mod scenarios;

pub use error::{Error, Result};
