//! Estimation for bivariate interval-valued (symbolic) data.
//!
//! Each interval observation is mapped to a realization of its internal
//! mean pair and internal variance-covariance triple. Those realizations are
//! modelled as bivariate normal (means) and bivariate Wishart (variations),
//! which gives closed-form maximum likelihood estimators for the between- and
//! within-interval parameters and, through the laws of total variance and
//! covariance, for the overall moments of the de-aggregated variables.
//!
//! Module map:
//!
//! * [`interval`]: domain types, validation and model parameters.
//! * [`internal`]: interval to internal-parameter realizations (uniform,
//!   triangular, Pert).
//! * [`estimators`]: between, within and overall estimators plus the
//!   empirical descriptive statistics.
//! * [`likelihood`]: log-likelihood, analytic gradient and a
//!   finite-difference oracle.
//! * [`asymptotics`]: asymptotic variances and the ten-component `g` vectors.
//! * [`simulate`]: seeded generators and the replication study harness.
//! * [`pca`]: symbolic covariance matrices, Jacobi eigensolver and
//!   principal-component intervals.
//! * [`datasets`]: the four small reference data sets.

pub mod asymptotics;
pub mod datasets;
pub mod error;
pub mod estimators;
pub mod internal;
pub mod interval;
pub mod likelihood;
pub mod pca;
pub mod simulate;

pub use error::{Error, Result};
pub use interval::{
    validate_sample, BivariateIntervalObs, BivariateIntervalSample, InternalModel, Interval,
    TauParams, DEFAULT_NU,
};
pub use internal::ThetaRealization;
