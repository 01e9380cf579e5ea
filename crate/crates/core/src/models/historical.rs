use crate::error::{Error, Result};
use crate::scores::{JointForecast, Level};

/// Empirical (VaR, ES) from a window of returns: with k = ⌈αn⌉, VaR is the
/// k-th smallest return and ES the mean of the k smallest.
pub fn hs_forecast(window_returns: &[f64], alpha: Level) -> Result<JointForecast> {
    let n = window_returns.len();
    if n == 0 {
        return Err(Error::InsufficientData { required: 1, actual: 0 });
    }
    // αn is often an integer that binary rounding pushes a hair above itself.
    let k = ((alpha.value() * n as f64 - 1e-9).ceil() as usize).clamp(1, n);
    let mut sorted = window_returns.to_vec();
    if sorted.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("historical window"));
    }
    sorted.sort_by(f64::total_cmp);
    let var = sorted[k - 1];
    // Averaging offsets from VaR keeps ES exactly equal to VaR for ties.
    let es = var + sorted[..k].iter().map(|x| x - var).sum::<f64>() / k as f64;
    JointForecast::new(var, es.min(var))
}
