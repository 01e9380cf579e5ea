//! Gaussian quasi-maximum-likelihood fitting of the variance recursion
//!
//! ```text
//! σ²_t = ω + γ·d_{t−1} + β·σ²_{t−1}
//! ```
//!
//! where the driver d is the realized kernel (HEAVY) or the squared daily
//! return (GARCH(1,1)). `driver_series[t]` is the driver observed at the end
//! of day t, aligned with `returns[t]`; σ²_0 is seeded with the sample
//! variance of the returns being filtered.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::distribution::StudentTSampler;
use super::optim::{nelder_mead, NelderMeadOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Driver {
    RealizedKernel,
    SquaredReturn,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolatilityModelParams {
    pub omega: f64,
    pub gamma: f64,
    pub beta: f64,
    pub driver: Driver,
    pub nu: u32,
}

impl VolatilityModelParams {
    pub const DEFAULT_NU: u32 = 6;

    pub fn new(omega: f64, gamma: f64, beta: f64, driver: Driver, nu: u32) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::invalid(format!("omega must be positive, got {omega}")));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::invalid(format!("gamma must be nonnegative, got {gamma}")));
        }
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::invalid(format!("beta must lie in [0, 1), got {beta}")));
        }
        if nu <= 2 {
            return Err(Error::invalid(format!("nu must exceed 2, got {nu}")));
        }
        Ok(VolatilityModelParams { omega, gamma, beta, driver, nu })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QmlFit {
    pub params: VolatilityModelParams,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set when a parameter sits on (numerically) the edge of its domain.
    pub at_boundary: bool,
}

fn sample_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
}

/// σ²_0..σ²_{n} for the returns: the first n entries are the in-sample
/// conditional variances, the last is the one-step-ahead forecast.
pub fn filter_variance(params: &VolatilityModelParams, returns: &[f64], driver_series: &[f64]) -> Result<Vec<f64>> {
    if returns.len() != driver_series.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} returns but {} driver values",
            returns.len(),
            driver_series.len()
        )));
    }
    if returns.is_empty() {
        return Err(Error::InsufficientData { required: 1, actual: 0 });
    }
    let mut out = Vec::with_capacity(returns.len() + 1);
    let mut s2 = sample_variance(returns);
    out.push(s2);
    for &d in driver_series {
        s2 = params.omega + params.gamma * d + params.beta * s2;
        out.push(s2);
    }
    Ok(out)
}

/// One-step-ahead conditional variance after the last observation.
pub fn forecast_variance(params: &VolatilityModelParams, returns: &[f64], driver_series: &[f64]) -> Result<f64> {
    let path = filter_variance(params, returns, driver_series)?;
    Ok(path[path.len() - 1])
}

fn neg_quasi_loglik(omega: f64, gamma: f64, beta: f64, seed: f64, returns: &[f64], driver: &[f64]) -> f64 {
    let mut s2 = seed;
    let mut total = 0.0;
    for t in 0..returns.len() {
        if t > 0 {
            s2 = omega + gamma * driver[t - 1] + beta * s2;
        }
        if !(s2 > 0.0) {
            return f64::INFINITY;
        }
        total += s2.ln() + returns[t] * returns[t] / s2;
    }
    0.5 * total
}

fn to_natural(theta: &[f64]) -> (f64, f64, f64) {
    (theta[0].exp(), theta[1].exp(), 1.0 / (1.0 + (-theta[2]).exp()))
}

fn to_unconstrained(omega: f64, gamma: f64, beta: f64) -> Vec<f64> {
    vec![omega.ln(), gamma.max(1e-8).ln(), (beta / (1.0 - beta)).ln()]
}

/// Maximizes the Gaussian quasi-log-likelihood −½Σ(log σ²_t + R²_t/σ²_t)
/// with a Nelder–Mead search on (log ω, log γ, logit β), started from three
/// fixed points. Returns the best of the three.
pub fn fit_qml(returns: &[f64], driver_series: &[f64], driver: Driver) -> Result<QmlFit> {
    if returns.len() != driver_series.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} returns but {} driver values",
            returns.len(),
            driver_series.len()
        )));
    }
    if returns.len() < 3 {
        return Err(Error::InsufficientData { required: 3, actual: returns.len() });
    }
    if returns.iter().chain(driver_series).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("qml input"));
    }
    let var = sample_variance(returns);
    if !(var > 0.0) || returns.iter().all(|x| *x == returns[0]) {
        return Err(Error::DegenerateLikelihood("returns have zero variance".into()));
    }
    let mean_driver = driver_series.iter().sum::<f64>() / driver_series.len() as f64;

    let objective = |theta: &[f64]| {
        let (o, g, b) = to_natural(theta);
        neg_quasi_loglik(o, g, b, var, returns, driver_series)
    };

    let opts = NelderMeadOptions { max_iterations: 4000, f_tolerance: 1e-9, x_tolerance: 1e-7, initial_step: 0.3 };
    let mut best: Option<super::optim::Minimum> = None;
    for &(g0, b0) in &[(0.05, 0.90), (0.30, 0.60), (0.50, 0.30)] {
        let omega0 = (var * (1.0 - b0) - g0 * mean_driver).max(0.05 * var);
        let start = to_unconstrained(omega0, g0, b0);
        let m = nelder_mead(objective, &start, &opts);
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let best = best.expect("three starts");
    let (omega, gamma, beta) = to_natural(&best.x);
    let params = VolatilityModelParams::new(omega, gamma, beta.min(1.0 - f64::EPSILON), driver, VolatilityModelParams::DEFAULT_NU)
        .map_err(|_| Error::DegenerateLikelihood(format!("optimum left the parameter domain: ({omega}, {gamma}, {beta})")))?;
    let log_likelihood = -best.value;
    if !best.converged {
        return Err(Error::NonConvergence { iterations: best.iterations, log_likelihood, best: params });
    }
    let at_boundary = gamma < 1e-6 || beta > 1.0 - 1e-6 || omega < 1e-8 * var;
    Ok(QmlFit { params, log_likelihood, iterations: best.iterations, converged: true, at_boundary })
}

/// Simulates the recursion with scaled Student-t innovations. For
/// `SquaredReturn` the driver is generated endogenously and `exogenous` is
/// ignored; for `RealizedKernel` it must supply `n` driver values.
/// Returns `(returns, driver_series)` aligned as expected by [`fit_qml`].
pub fn simulate_process<R: RngCore + ?Sized>(
    params: &VolatilityModelParams,
    n: usize,
    exogenous: Option<&[f64]>,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let sampler = StudentTSampler::new(params.nu)?;
    let scale = ((params.nu as f64 - 2.0) / params.nu as f64).sqrt();
    let mut s2 = match (params.driver, exogenous) {
        (Driver::SquaredReturn, _) if params.gamma + params.beta < 1.0 => params.omega / (1.0 - params.gamma - params.beta),
        (Driver::SquaredReturn, _) => params.omega / (1.0 - params.beta),
        (Driver::RealizedKernel, Some(rk)) if rk.len() >= n => {
            let mean = rk.iter().take(n).sum::<f64>() / n.max(1) as f64;
            (params.omega + params.gamma * mean) / (1.0 - params.beta)
        }
        (Driver::RealizedKernel, _) => {
            return Err(Error::invalid(format!("HEAVY simulation needs {n} exogenous driver values")));
        }
    };
    let mut returns = Vec::with_capacity(n);
    let mut drivers = Vec::with_capacity(n);
    for t in 0..n {
        if t > 0 {
            s2 = params.omega + params.gamma * drivers[t - 1] + params.beta * s2;
        }
        let r = s2.sqrt() * scale * sampler.sample(rng);
        returns.push(r);
        drivers.push(match params.driver {
            Driver::SquaredReturn => r * r,
            Driver::RealizedKernel => exogenous.expect("checked above")[t],
        });
    }
    Ok((returns, drivers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn params_validation() {
        assert!(VolatilityModelParams::new(0.0, 0.1, 0.5, Driver::SquaredReturn, 6).is_err());
        assert!(VolatilityModelParams::new(0.1, -0.1, 0.5, Driver::SquaredReturn, 6).is_err());
        assert!(VolatilityModelParams::new(0.1, 0.1, 1.0, Driver::SquaredReturn, 6).is_err());
        assert!(VolatilityModelParams::new(0.1, 0.1, 0.5, Driver::SquaredReturn, 2).is_err());
    }

    #[test]
    fn filter_recursion_by_hand() {
        let p = VolatilityModelParams::new(0.1, 0.5, 0.4, Driver::SquaredReturn, 6).unwrap();
        let r = [1.0, -1.0];
        let path = filter_variance(&p, &r, &[1.0, 1.0]).unwrap();
        // seed = population variance of (1, −1) = 1
        assert_eq!(path[0], 1.0);
        assert!((path[1] - (0.1 + 0.5 + 0.4)).abs() < 1e-15);
        assert!((path[2] - (0.1 + 0.5 + 0.4 * path[1])).abs() < 1e-15);
    }

    #[test]
    fn constant_returns_are_degenerate() {
        let r = vec![0.3; 200];
        let d: Vec<f64> = r.iter().map(|x| x * x).collect();
        assert!(matches!(fit_qml(&r, &d, Driver::SquaredReturn), Err(Error::DegenerateLikelihood(_))));
    }

    #[test]
    fn recovers_garch_parameters() {
        let truth = VolatilityModelParams::new(0.1, 0.5, 0.4, Driver::SquaredReturn, 6).unwrap();
        let mut rng = substream(7, 0);
        let (r, d) = simulate_process(&truth, 20_000, None, &mut rng).unwrap();
        let fit = fit_qml(&r, &d, Driver::SquaredReturn).unwrap();
        let p = fit.params;
        assert!((p.omega - 0.1).abs() < 0.05, "{p:?}");
        assert!((p.gamma - 0.5).abs() < 0.05, "{p:?}");
        assert!((p.beta - 0.4).abs() < 0.05, "{p:?}");
        assert!(!fit.at_boundary);
    }

    #[test]
    fn constant_variance_fits_gamma_near_zero() {
        // γ = 0: returns are i.i.d. with variance ω/(1 − β); only that ratio is identified.
        let truth = VolatilityModelParams::new(0.5, 0.0, 0.5, Driver::SquaredReturn, 6).unwrap();
        let mut rng = substream(11, 0);
        let (r, d) = simulate_process(&truth, 20_000, None, &mut rng).unwrap();
        let fit = fit_qml(&r, &d, Driver::SquaredReturn).unwrap();
        let p = fit.params;
        let var = sample_variance(&r);
        assert!(p.gamma < 0.03, "{p:?}");
        assert!((p.omega - var * (1.0 - p.beta)).abs() < 0.05 * var, "{p:?} var {var}");
    }

    #[test]
    fn heavy_requires_exogenous_driver() {
        let p = VolatilityModelParams::new(0.1, 0.5, 0.4, Driver::RealizedKernel, 6).unwrap();
        let mut rng = substream(1, 0);
        assert!(simulate_process(&p, 10, None, &mut rng).is_err());
        assert!(fit_qml(&[1.0, 2.0], &[1.0], Driver::RealizedKernel).is_err());
    }
}
