//! Monte Carlo study of the dominance test's size and power.
//!
//! The data-generating process is σ²_t = 0.5·RK_{t−1} + 0.7·σ²_{t−1} with
//! σ²_0 = 0.35 and R_t = √((ν−2)/ν)·σ_t·X_t, X_t ~ t_ν. Forecaster m adds a
//! single N(0, ζ_m) error to both components of the perfect (VaR, ES).
//! The realized kernel comes from a supplied series (RK_{t−1} = rk[t−1],
//! zero-based) or from a stationary lognormal AR(1).

use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dominance::{dominance_test, DominanceTestConfig};
use crate::error::{Error, Result};
use crate::models::{ScaledT, StudentTSampler};
use crate::murphy::EvaluationSeries;
use crate::rng::{derive_seed, substream};
use crate::scores::{JointForecast, Level};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RkSource {
    /// Recorded values; at least `horizon` entries are used.
    Observed(Vec<f64>),
    /// log rk_t = a + b·log rk_{t−1} + c·η_t, started from its stationary law.
    SyntheticAr { a: f64, b: f64, c: f64 },
}

impl RkSource {
    pub fn synthetic_default() -> Self {
        RkSource::SyntheticAr { a: -0.3 * (1.0 - 0.95), b: 0.95, c: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpConfig {
    pub rk_source: RkSource,
    pub coeff_rk: f64,
    pub coeff_lag: f64,
    pub sigma0_sq: f64,
    pub nu: u32,
    pub horizon: usize,
    pub seed: u64,
}

impl Default for DgpConfig {
    fn default() -> Self {
        DgpConfig {
            rk_source: RkSource::synthetic_default(),
            coeff_rk: 0.5,
            coeff_lag: 0.7,
            sigma0_sq: 0.35,
            nu: 6,
            horizon: 500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedPath {
    /// RK_0, ..., RK_{T−1}.
    pub rk: Vec<f64>,
    /// σ_1, ..., σ_T.
    pub sigma: Vec<f64>,
    /// R_1, ..., R_T.
    pub returns: Vec<f64>,
}

fn synthetic_rk(a: f64, b: f64, c: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(b.abs() < 1.0) || !a.is_finite() || !c.is_finite() {
        return Err(Error::invalid(format!("synthetic rk needs |b| < 1 and finite a, c (got a={a}, b={b}, c={c})")));
    }
    let mut rng = substream(seed, 0);
    let sd = c.abs() / (1.0 - b * b).sqrt();
    let eta: f64 = StandardNormal.sample(&mut rng);
    let mut log_rk = a / (1.0 - b) + sd * eta;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            let eta: f64 = StandardNormal.sample(&mut rng);
            log_rk = a + b * log_rk + c * eta;
        }
        out.push(log_rk.exp());
    }
    Ok(out)
}

/// Simulates σ and the returns over `config.horizon` periods.
pub fn simulate_dgp(config: &DgpConfig) -> Result<SimulatedPath> {
    let n = config.horizon;
    if n < 1 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    if !(config.sigma0_sq > 0.0) || !config.sigma0_sq.is_finite() {
        return Err(Error::invalid(format!("sigma0_sq must be positive, got {}", config.sigma0_sq)));
    }
    if !(config.coeff_rk >= 0.0 && config.coeff_lag >= 0.0) {
        return Err(Error::invalid("recursion coefficients must be nonnegative"));
    }
    if config.nu <= 2 {
        return Err(Error::invalid(format!("nu must exceed 2, got {}", config.nu)));
    }
    let rk = match &config.rk_source {
        RkSource::Observed(values) => {
            if values.len() < n {
                return Err(Error::InsufficientData { required: n, actual: values.len() });
            }
            if let Some(bad) = values[..n].iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
                return Err(Error::invalid(format!("rk must be finite and nonnegative, got {bad}")));
            }
            values[..n].to_vec()
        }
        RkSource::SyntheticAr { a, b, c } => synthetic_rk(*a, *b, *c, n, config.seed)?,
    };
    let sampler = StudentTSampler::new(config.nu)?;
    let scale = ((config.nu as f64 - 2.0) / config.nu as f64).sqrt();
    let mut rng = substream(config.seed, 1);
    let mut var = config.sigma0_sq;
    let mut sigma = Vec::with_capacity(n);
    let mut returns = Vec::with_capacity(n);
    for &driver in &rk {
        var = config.coeff_rk * driver + config.coeff_lag * var;
        let s = var.sqrt();
        sigma.push(s);
        returns.push(scale * s * sampler.sample(&mut rng));
    }
    Ok(SimulatedPath { rk, sigma, returns })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecasterSpec {
    /// Variance of the error added to both forecast components.
    pub zeta: f64,
}

/// Perfect scaled-t forecasts shifted by one N(0, ζ) draw per period.
pub fn make_forecaster(
    sigma: &[f64],
    spec: ForecasterSpec,
    alpha: Level,
    nu: u32,
    seed: u64,
) -> Result<Vec<JointForecast>> {
    if !(spec.zeta >= 0.0) || !spec.zeta.is_finite() {
        return Err(Error::invalid(format!("zeta must be nonnegative, got {}", spec.zeta)));
    }
    let perfect = ScaledT::new(alpha, nu)?;
    let noise = Normal::new(0.0, spec.zeta.sqrt()).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = substream(seed, 0);
    sigma
        .iter()
        .map(|&s| {
            let fc = perfect.forecast(s)?;
            if spec.zeta == 0.0 {
                Ok(fc)
            } else {
                fc.shifted(noise.sample(&mut rng))
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub zeta1: f64,
    pub zeta2: f64,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub nominal_level: f64,
    pub rejection_rate: f64,
    /// Binomial standard error √(p(1−p)/n).
    pub se: f64,
    pub replications: usize,
}

/// One replication: simulate, forecast with ζ1 (method A) and ζ2 (method
/// B), test H0 "model 1 dominates model 2"; returns the minimal adjusted p.
pub fn study_replication(
    dgp: &DgpConfig,
    zeta1: f64,
    zeta2: f64,
    test: &DominanceTestConfig,
    index: u64,
) -> Result<f64> {
    let rep_seed = derive_seed(dgp.seed, index);
    let path = simulate_dgp(&DgpConfig { seed: rep_seed, ..dgp.clone() })?;
    let alpha = test.alpha_level;
    let a = make_forecaster(&path.sigma, ForecasterSpec { zeta: zeta1 }, alpha, dgp.nu, derive_seed(rep_seed, 1))?;
    let b = make_forecaster(&path.sigma, ForecasterSpec { zeta: zeta2 }, alpha, dgp.nu, derive_seed(rep_seed, 2))?;
    let series = EvaluationSeries::pair(a, b, path.returns)?;
    let config = DominanceTestConfig { seed: derive_seed(rep_seed, 3), ..test.clone() };
    let (a_dominates_b, _) = dominance_test(&series, &config)?;
    Ok(a_dominates_b.minimal_wy_p)
}

/// Rejection rates of H0 "model 1 dominates model 2" at each nominal level.
pub fn size_power_study(
    dgp: &DgpConfig,
    zeta1: f64,
    zeta2: f64,
    replications: usize,
    test: &DominanceTestConfig,
    nominal_levels: &[f64],
) -> Result<Vec<StudyRow>> {
    if replications < 1 {
        return Err(Error::invalid("replications must be at least 1"));
    }
    if let Some(l) = nominal_levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
        return Err(Error::invalid(format!("nominal level must lie in (0, 1), got {l}")));
    }
    let min_p: Vec<f64> = (0..replications as u64)
        .into_par_iter()
        .map(|i| study_replication(dgp, zeta1, zeta2, test, i))
        .collect::<Result<_>>()?;
    let n = replications as f64;
    Ok(nominal_levels
        .iter()
        .map(|&level| {
            let rate = min_p.iter().filter(|p| **p < level).count() as f64 / n;
            StudyRow {
                zeta1,
                zeta2,
                horizon: dgp.horizon,
                nominal_level: level,
                rejection_rate: rate,
                se: (rate * (1.0 - rate) / n).sqrt(),
                replications,
            }
        })
        .collect())
}
