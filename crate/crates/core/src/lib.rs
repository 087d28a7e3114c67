//! Differentially private bootstrap confidence intervals under Gaussian DP.
//!
//! * [`gdp`]: G_μ, the Gaussian mechanism, composition and (ε, δ) conversion.
//! * [`tradeoff`]: trade-off curve calculus behind the bootstrap privacy guarantee.
//! * [`estimators`]: bounded mean and ridge-logistic statistics, scenario samplers.
//! * [`bootstrap`]: empirical and μ-GDP m-out-of-n bootstrap, intervals.
//! * [`blbquant`]: the BLBQuant baseline.
//! * [`experiments`]: coverage studies and reports.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blbquant;
pub mod bootstrap;
pub mod cli;
pub mod curve;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod gdp;
pub mod normal;
pub mod rng;
pub mod tradeoff;

pub use curve::{GaussianMixture, GridCurve, TradeoffCurve};
pub use error::{Error, Result};
pub use gdp::{DpParameters, GaussianMechanism, PrivacyBudget};
