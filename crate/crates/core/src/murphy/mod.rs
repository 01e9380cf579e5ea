//! Murphy diagrams: empirical mean elementary scores over a threshold grid,
//! and A-minus-B difference curves with pointwise 95% bands.
//!
//! Empirical dominance is only checked at the grid points; a violation
//! between two adjacent thresholds would go unnoticed.

mod output;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use output::{emit_curve_data, CurveFormat, LabeledCurve};

use crate::dominance::VarianceEstimator;
use crate::error::{Error, Result};
use crate::scores::{build_threshold_grid, elementary_unchecked, GridKind, JointForecast, Level, ThresholdGrid};

/// Multiplier of the pointwise standard error for the 95% band.
pub const BAND_MULTIPLIER: f64 = 1.96;

/// Aligned forecasts of one or two methods and the realizations they target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSeries {
    times: Vec<i64>,
    forecasts_a: Vec<JointForecast>,
    forecasts_b: Option<Vec<JointForecast>>,
    realizations: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    A,
    B,
}

impl EvaluationSeries {
    pub fn new(
        times: Vec<i64>,
        forecasts_a: Vec<JointForecast>,
        forecasts_b: Option<Vec<JointForecast>>,
        realizations: Vec<f64>,
    ) -> Result<Self> {
        let t = times.len();
        if forecasts_a.len() != t || realizations.len() != t || forecasts_b.as_ref().is_some_and(|b| b.len() != t) {
            return Err(Error::DimensionMismatch(format!(
                "{} times, {} forecasts (A), {} forecasts (B), {} realizations",
                t,
                forecasts_a.len(),
                forecasts_b.as_ref().map_or(0, Vec::len),
                realizations.len()
            )));
        }
        if t == 0 {
            return Err(Error::InsufficientData { required: 1, actual: 0 });
        }
        if let Some(i) = times.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!("times not strictly increasing at position {}", i + 1)));
        }
        if realizations.iter().any(|y| !y.is_finite()) {
            return Err(Error::NonFinite("realization"));
        }
        Ok(EvaluationSeries { times, forecasts_a, forecasts_b, realizations })
    }

    /// Convenience constructor with times 0, 1, 2, ...
    pub fn pair(forecasts_a: Vec<JointForecast>, forecasts_b: Vec<JointForecast>, realizations: Vec<f64>) -> Result<Self> {
        let times = (0..realizations.len() as i64).collect();
        EvaluationSeries::new(times, forecasts_a, Some(forecasts_b), realizations)
    }

    /// Attaches `other`'s method-A forecasts as method B; times must agree.
    pub fn with_method_b(mut self, other: &EvaluationSeries) -> Result<Self> {
        if let Some(i) = (0..self.len().max(other.len())).find(|&i| self.times.get(i) != other.times.get(i)) {
            return Err(Error::DimensionMismatch(format!(
                "time indices differ at position {i}: {:?} vs {:?}",
                self.times.get(i),
                other.times.get(i)
            )));
        }
        self.forecasts_b = Some(other.forecasts_a.clone());
        Ok(self)
    }

    /// The same series with the roles of A and B exchanged.
    pub fn swapped(&self) -> Result<Self> {
        let b = self.require_b()?.to_vec();
        Ok(EvaluationSeries {
            times: self.times.clone(),
            forecasts_a: b,
            forecasts_b: Some(self.forecasts_a.clone()),
            realizations: self.realizations.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[i64] {
        &self.times
    }

    pub fn forecasts_a(&self) -> &[JointForecast] {
        &self.forecasts_a
    }

    pub fn forecasts_b(&self) -> Option<&[JointForecast]> {
        self.forecasts_b.as_deref()
    }

    pub fn realizations(&self) -> &[f64] {
        &self.realizations
    }

    pub fn forecasts(&self, method: Method) -> Result<&[JointForecast]> {
        match method {
            Method::A => Ok(&self.forecasts_a),
            Method::B => self.require_b(),
        }
    }

    fn require_b(&self) -> Result<&[JointForecast]> {
        self.forecasts_b.as_deref().ok_or_else(|| Error::invalid("method B forecasts are required"))
    }

    /// Every forecast component of both methods plus all realizations.
    pub fn range_values(&self) -> (Vec<f64>, &[f64]) {
        let b = self.forecasts_b.as_deref().unwrap_or(&[]);
        let values = self.forecasts_a.iter().chain(b).flat_map(|f| [f.var(), f.es()]).collect();
        (values, &self.realizations)
    }

    /// `n` equally spaced thresholds spanning all forecasts and realizations.
    pub fn grid(&self, n: usize, kind: GridKind) -> Result<ThresholdGrid> {
        let (values, y) = self.range_values();
        build_threshold_grid(&values, y, n, kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MurphyCurve {
    pub grid: ThresholdGrid,
    pub mean_scores: Vec<f64>,
    /// Sample variance of the per-period scores divided by T (zero when T = 1).
    pub pointwise_variance: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffCurve {
    pub grid: ThresholdGrid,
    /// Method A minus method B.
    pub mean_diffs: Vec<f64>,
    pub ci_lower: Vec<f64>,
    pub ci_upper: Vec<f64>,
    /// A weakly dominates B on the grid: every mean difference is ≤ 0.
    pub a_dominates_on_grid: bool,
}

/// Per-period elementary scores of one method at threshold `v`.
fn period_scores(forecasts: &[JointForecast], y: &[f64], kind: GridKind, v: f64, alpha: f64) -> Vec<f64> {
    forecasts.iter().zip(y).map(|(fc, &y)| elementary_unchecked(kind, fc, y, v, alpha)).collect()
}

/// Per-period A-minus-B elementary score differences at threshold `v`.
pub(crate) fn period_diffs(series: &EvaluationSeries, kind: GridKind, v: f64, alpha: f64) -> Result<Vec<f64>> {
    let b = series.require_b()?;
    Ok(series
        .forecasts_a
        .iter()
        .zip(b)
        .zip(&series.realizations)
        .map(|((fa, fb), &y)| elementary_unchecked(kind, fa, y, v, alpha) - elementary_unchecked(kind, fb, y, v, alpha))
        .collect())
}

fn mean_and_variance_of_mean(x: &[f64]) -> (f64, f64) {
    let t = x.len() as f64;
    let mean = x.iter().sum::<f64>() / t;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (t - 1.0) / t)
}

fn check_grid(grid: &ThresholdGrid) -> Result<()> {
    if grid.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("threshold"));
    }
    Ok(())
}

/// Mean elementary score of one method at every grid threshold. The grid
/// kind selects the quantile-type (V1) or ES-type (V2) family.
pub fn murphy_curve(series: &EvaluationSeries, method: Method, grid: &ThresholdGrid, alpha: Level) -> Result<MurphyCurve> {
    check_grid(grid)?;
    let forecasts = series.forecasts(method)?;
    let (kind, a) = (grid.kind(), alpha.value());
    let stats: Vec<(f64, f64)> = grid
        .values()
        .par_iter()
        .map(|&v| mean_and_variance_of_mean(&period_scores(forecasts, &series.realizations, kind, v, a)))
        .collect();
    Ok(MurphyCurve {
        grid: grid.clone(),
        mean_scores: stats.iter().map(|s| s.0).collect(),
        pointwise_variance: stats.iter().map(|s| s.1).collect(),
    })
}

/// A-minus-B difference curve with band mean ± 1.96·se, where se² is the
/// chosen estimator's variance of the mean difference. Series too short
/// for the estimator (e.g. T = 1) and constant differences give a
/// zero-width band.
pub fn murphy_diff(
    series: &EvaluationSeries,
    grid: &ThresholdGrid,
    alpha: Level,
    variance: VarianceEstimator,
) -> Result<DiffCurve> {
    check_grid(grid)?;
    series.require_b()?;
    let (kind, a) = (grid.kind(), alpha.value());
    let stats: Vec<(f64, f64)> = grid
        .values()
        .par_iter()
        .map(|&v| {
            let d = period_diffs(series, kind, v, a)?;
            let mean = d.iter().sum::<f64>() / d.len() as f64;
            let constant = d.iter().all(|x| *x == d[0]);
            let se = if constant || d.len() < variance.min_len() {
                0.0
            } else {
                variance.variance_of_mean(&d)?.sqrt()
            };
            Ok((mean, se))
        })
        .collect::<Result<_>>()?;
    let mean_diffs: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let ci_lower = stats.iter().map(|(m, se)| m - BAND_MULTIPLIER * se).collect();
    let ci_upper = stats.iter().map(|(m, se)| m + BAND_MULTIPLIER * se).collect();
    let a_dominates_on_grid = mean_diffs.iter().all(|d| *d <= 0.0);
    Ok(DiffCurve { grid: grid.clone(), mean_diffs, ci_lower, ci_upper, a_dominates_on_grid })
}
