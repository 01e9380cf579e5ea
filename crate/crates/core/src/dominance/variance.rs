//! Variance of a sample mean: i.i.d. and Newey–West (Bartlett kernel).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarianceKind {
    Iid,
    NeweyWest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarianceEstimator {
    pub kind: VarianceKind,
    /// Truncation lag, only used by `NeweyWest`.
    pub lag: usize,
}

impl Default for VarianceEstimator {
    fn default() -> Self {
        VarianceEstimator::iid()
    }
}

impl VarianceEstimator {
    pub const DEFAULT_NW_LAG: usize = 3;

    pub fn iid() -> Self {
        VarianceEstimator { kind: VarianceKind::Iid, lag: Self::DEFAULT_NW_LAG }
    }

    pub fn newey_west(lag: usize) -> Self {
        VarianceEstimator { kind: VarianceKind::NeweyWest, lag }
    }

    /// Smallest series length the estimator accepts.
    pub fn min_len(&self) -> usize {
        match self.kind {
            VarianceKind::Iid => 2,
            VarianceKind::NeweyWest => (self.lag + 2).max(2),
        }
    }

    /// Estimated variance of the sample mean of `x`:
    /// s²/T (s² with T − 1 denominator) for `Iid`, LRV/T for `NeweyWest`.
    pub fn variance_of_mean(&self, x: &[f64]) -> Result<f64> {
        let t = x.len();
        if t < self.min_len() {
            return Err(Error::InsufficientData { required: self.min_len(), actual: t });
        }
        match self.kind {
            VarianceKind::Iid => {
                let mean = mean(x);
                let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
                Ok(ss / (t - 1) as f64 / t as f64)
            }
            VarianceKind::NeweyWest => Ok(newey_west_variance(x, self.lag)? / t as f64),
        }
    }
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Bartlett-kernel long-run variance γ̂₀ + 2Σ_{j=1..lag}(1 − j/(lag+1))γ̂_j,
/// with γ̂_j = (1/T)Σ_{t>j}(x_t − x̄)(x_{t−j} − x̄). Floored at zero.
///
/// This estimates T·Var(x̄); divide by T for the variance of the mean.
/// With `lag = 0` it is the divide-by-T sample variance.
pub fn newey_west_variance(x: &[f64], lag: usize) -> Result<f64> {
    let t = x.len();
    if t < lag + 2 {
        return Err(Error::InsufficientData { required: lag + 2, actual: t });
    }
    let m = mean(x);
    let centered: Vec<f64> = x.iter().map(|v| v - m).collect();
    let autocov = |j: usize| centered[j..].iter().zip(&centered[..t - j]).map(|(a, b)| a * b).sum::<f64>() / t as f64;
    let mut lrv = autocov(0);
    for j in 1..=lag {
        let w = 1.0 - j as f64 / (lag as f64 + 1.0);
        lrv += 2.0 * w * autocov(j);
    }
    Ok(lrv.max(0.0))
}
