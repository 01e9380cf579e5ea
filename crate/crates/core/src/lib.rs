//! Comparative evaluation of joint (Value-at-Risk, Expected Shortfall)
//! forecasts.
//!
//! * [`scores`]: elementary scores S_{v1}, S_{v2}, the general consistent
//!   family and its mixture representation.
//! * [`murphy`]: Murphy diagrams and difference curves with pointwise bands.
//! * [`dominance`]: the sign-flip permutation test of forecast dominance with
//!   Westfall–Young step-down adjustment.
//! * [`models`]: HEAVY, GARCH(1,1) and historical-simulation forecasts on a
//!   rolling window.
//! * [`simulation`]: size and power of the dominance test by Monte Carlo.
//! * [`options`]: the put-option interpretation and its Black–Scholes check.
//!
//! Returns are in percent (100 × log returns) and the lower tail is
//! negative: VaR ≥ ES for any admissible forecast.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dominance;
pub mod error;
pub mod models;
pub mod murphy;
pub mod normal;
pub mod options;
pub mod rng;
pub mod scores;
pub mod simulation;

pub use dominance::{
    dominance_test, DominanceReport, DominanceTestConfig, DominanceTestResult, Reference, ScoreSet, VarianceEstimator,
};
pub use error::{Error, Result};
pub use murphy::{murphy_curve, murphy_diff, DiffCurve, EvaluationSeries, Method, MurphyCurve};
pub use scores::{
    build_threshold_grid, elementary_score_v1, elementary_score_v2, fz_score, mixture_score, DiscreteMixture, FzSpec,
    GridKind, JointForecast, Level, ThresholdGrid,
};
