//! Student-t quantiles and expected shortfall, plus the scaled-t (VaR, ES)
//! forecast used by the volatility models and the simulation study.

use rand::RngCore;
use statrs::distribution::{Continuous, ContinuousCDF, StudentsT};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::scores::{JointForecast, Level};

fn standard_t(nu: u32) -> Result<StudentsT> {
    if nu == 0 {
        return Err(Error::invalid("degrees of freedom must be at least 1"));
    }
    StudentsT::new(0.0, 1.0, nu as f64).map_err(|e| Error::invalid(e.to_string()))
}

/// Inverse CDF of the standard (unit-scale) Student-t with `nu` degrees of freedom.
pub fn student_t_quantile(p: f64, nu: u32) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("probability must lie in (0, 1), got {p}")));
    }
    let dist = standard_t(nu)?;
    Ok(quantile_with(&dist, p))
}

fn quantile_with(dist: &StudentsT, p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    // Work in the lower tail and reflect, so q(p) = −q(1 − p) exactly.
    let (tail, sign) = if p < 0.5 { (p, -1.0) } else { (1.0 - p, 1.0) };
    let mut x = dist.inverse_cdf(tail);
    for _ in 0..4 {
        let dens = dist.pdf(x);
        if !(dens > 0.0) {
            break;
        }
        let step = (dist.cdf(x) - tail) / dens;
        x -= step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    sign * x.abs()
}

fn t_log_density_const(nu: f64) -> f64 {
    ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * std::f64::consts::PI).ln()
}

/// Expected shortfall (1/α)∫₀^α q(u) du of the standard Student-t, in closed form:
/// −(ν + q²)/(ν − 1) · f(q)/α with q the α-quantile and f the density.
pub fn student_t_es(alpha: Level, nu: u32) -> Result<f64> {
    if nu <= 1 {
        return Err(Error::invalid(format!("expected shortfall needs nu > 1, got {nu}")));
    }
    let a = alpha.value();
    let q = student_t_quantile(a, nu)?;
    let n = nu as f64;
    let log_f = t_log_density_const(n) - 0.5 * (n + 1.0) * (1.0 + q * q / n).ln();
    Ok(-(n + q * q) / (n - 1.0) * log_f.exp() / a)
}

/// (VaR, ES) of σ·√((ν−2)/ν)·X with X standard Student-t, so that σ² is the
/// conditional variance.
pub fn scaled_t_var_es(sigma: f64, alpha: Level, nu: u32) -> Result<JointForecast> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    if nu <= 2 {
        return Err(Error::invalid(format!("scaled t needs nu > 2, got {nu}")));
    }
    let unit = ScaledT::new(alpha, nu)?;
    unit.forecast(sigma)
}

/// Cached unit-variance (VaR, ES) pair; scaling by σ is then a multiply.
#[derive(Debug, Clone, Copy)]
pub struct ScaledT {
    var_unit: f64,
    es_unit: f64,
}

impl ScaledT {
    pub fn new(alpha: Level, nu: u32) -> Result<Self> {
        if nu <= 2 {
            return Err(Error::invalid(format!("scaled t needs nu > 2, got {nu}")));
        }
        let scale = ((nu as f64 - 2.0) / nu as f64).sqrt();
        Ok(ScaledT {
            var_unit: scale * student_t_quantile(alpha.value(), nu)?,
            es_unit: scale * student_t_es(alpha, nu)?,
        })
    }

    pub fn forecast(&self, sigma: f64) -> Result<JointForecast> {
        let fc = JointForecast::new(sigma * self.var_unit, sigma * self.es_unit)?;
        debug_assert!(fc.var() >= fc.es());
        Ok(fc)
    }
}

/// Draws Student-t variates by inverting the CDF at uniforms from `rng`.
#[derive(Debug, Clone)]
pub struct StudentTSampler {
    dist: StudentsT,
}

impl StudentTSampler {
    pub fn new(nu: u32) -> Result<Self> {
        Ok(StudentTSampler { dist: standard_t(nu)? })
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        quantile_with(&self.dist, open_uniform(rng))
    }
}

/// Uniform on the open interval (0, 1) from the top 53 bits of one draw.
pub(crate) fn open_uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}
