//! Put-option reading of the ES-type elementary score.
//!
//! Writing a put with strike x1 at price α(x1 − v2) when x2 ≥ v2 yields
//! expected profit maximized at x1 = VaR_α(F); the fair price of that put is
//! α(VaR_α − ES_α). Under a lognormal terminal price this equals the
//! zero-rate Black–Scholes put struck at VaR_α.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::normal;
use crate::scores::{JointForecast, Level};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionScenario {
    pub spot0: f64,
    pub annual_vol: f64,
    pub maturity_years: f64,
    pub alpha: Level,
    pub strike: f64,
}

impl OptionScenario {
    pub fn new(spot0: f64, annual_vol: f64, maturity_years: f64, alpha: Level, strike: f64) -> Result<Self> {
        for (v, name) in [(spot0, "spot"), (annual_vol, "volatility"), (maturity_years, "maturity"), (strike, "strike")] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(OptionScenario { spot0, annual_vol, maturity_years, alpha, strike })
    }

    /// σ = τ√t, the standard deviation of the log terminal price.
    pub fn log_sd(&self) -> f64 {
        self.annual_vol * self.maturity_years.sqrt()
    }

    /// μ = ln y0 − ½τ²t, the mean of the log terminal price.
    pub fn log_mean(&self) -> f64 {
        self.spot0.ln() - 0.5 * self.log_sd().powi(2)
    }

    pub fn with_strike(&self, strike: f64) -> Result<Self> {
        OptionScenario::new(self.spot0, self.annual_vol, self.maturity_years, self.alpha, strike)
    }
}

/// P = α(VaR − ES).
pub fn es_put_price(alpha: Level, var: f64, es: f64) -> Result<f64> {
    ensure_finite(var, "var")?;
    ensure_finite(es, "es")?;
    if var < es {
        return Err(Error::ActionDomain { var, es });
    }
    Ok(alpha.value() * (var - es))
}

/// VaR_α and ES_α of the lognormal terminal price.
///
/// VaR = y0·exp(σz_α − ½σ²) and ES = (y0/α)Φ((ln(VaR/y0) − ½σ²)/σ). The
/// argument of Φ simplifies to z_α − σ, which stays exact for tiny σ where
/// the logarithm of the rounded ratio would not.
pub fn lognormal_var_es(scn: &OptionScenario) -> Result<JointForecast> {
    let s = scn.log_sd();
    let a = scn.alpha.value();
    let z = normal::quantile(a);
    let var = scn.spot0 * (s * z - 0.5 * s * s).exp();
    let es = scn.spot0 / a * normal::cdf(z - s);
    JointForecast::new(var, es.min(var))
}

/// Black–Scholes put at zero interest: K·Φ(d+) − y0·Φ(d−),
/// d± = (ln(K/y0) ± ½τ²t)/(τ√t).
pub fn black_scholes_put_zero_rate(scn: &OptionScenario) -> f64 {
    let s = scn.log_sd();
    let m = (scn.strike / scn.spot0).ln();
    let d_plus = (m + 0.5 * s * s) / s;
    let d_minus = (m - 0.5 * s * s) / s;
    (scn.strike * normal::cdf(d_plus) - scn.spot0 * normal::cdf(d_minus)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricingCheck {
    pub var: f64,
    pub es: f64,
    pub p_es: f64,
    pub p_bs: f64,
    pub abs_diff: f64,
}

/// Prices the put struck at the lognormal VaR both ways.
pub fn verify_pricing_equivalence(scn: &OptionScenario) -> Result<PricingCheck> {
    let fc = lognormal_var_es(scn)?;
    let p_es = es_put_price(scn.alpha, fc.var(), fc.es())?;
    let p_bs = black_scholes_put_zero_rate(&scn.with_strike(fc.var())?);
    Ok(PricingCheck { var: fc.var(), es: fc.es(), p_es, p_bs, abs_diff: (p_es - p_bs).abs() })
}

/// Distribution with finitely many atoms; probabilities sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    /// (value, probability), sorted by value, values distinct.
    atoms: Vec<(f64, f64)>,
}

impl DiscreteDistribution {
    /// Sorts and merges the atoms; probabilities must be nonnegative and sum to 1.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("distribution needs at least one atom"));
        }
        if atoms.iter().any(|(y, p)| !y.is_finite() || !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::invalid("atoms must be finite with nonnegative probabilities"));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (y, p) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == y => last.1 += p,
                _ => merged.push((y, p)),
            }
        }
        Ok(DiscreteDistribution { atoms: merged })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// F(x) = P(Y ≤ x).
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 <= x).map(|a| a.1).sum()
    }

    /// ∫_{(−∞, x]} y dF(y).
    pub fn partial_expectation(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 <= x).map(|a| a.0 * a.1).sum()
    }

    /// E f(Y), summed exactly over the atoms.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(y, p)| p * f(y)).sum()
    }

    /// VaR_α = inf{z : F(z) ≥ α}.
    pub fn var(&self, alpha: Level) -> f64 {
        let a = alpha.value();
        let mut cum = 0.0;
        for &(y, p) in &self.atoms {
            cum += p;
            if cum >= a {
                return y;
            }
        }
        self.atoms[self.atoms.len() - 1].0
    }

    /// ES_α = (1/α)[Σ_{y < VaR} y·p + (α − F(VaR−))·VaR].
    pub fn es(&self, alpha: Level) -> f64 {
        let a = alpha.value();
        let q = self.var(alpha);
        let below: Vec<&(f64, f64)> = self.atoms.iter().filter(|t| t.0 < q).collect();
        let mass: f64 = below.iter().map(|t| t.1).sum();
        let partial: f64 = below.iter().map(|t| t.0 * t.1).sum();
        ((partial + (a - mass) * q) / a).min(q)
    }

    pub fn var_es(&self, alpha: Level) -> Result<JointForecast> {
        JointForecast::new(self.var(alpha), self.es(alpha))
    }
}

/// Distribution of the terminal price for [`expected_profit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PriceDistribution {
    Discrete(DiscreteDistribution),
    /// ln Y ~ N(μ, σ²) with μ = ln y0 − ½σ², σ = τ√t.
    Lognormal { spot0: f64, annual_vol: f64, maturity_years: f64 },
}

impl PriceDistribution {
    fn cdf_and_partial(&self, x: f64) -> (f64, f64) {
        match self {
            PriceDistribution::Discrete(d) => (d.cdf(x), d.partial_expectation(x)),
            PriceDistribution::Lognormal { spot0, annual_vol, maturity_years } => {
                if x <= 0.0 {
                    return (0.0, 0.0);
                }
                let s = annual_vol * maturity_years.sqrt();
                let z = ((x / spot0).ln() + 0.5 * s * s) / s;
                (normal::cdf(z), spot0 * normal::cdf(z - s))
            }
        }
    }
}

/// E(π) = 1{v2 ≤ x2}(x1(α − F(x1)) + ∫_{(−∞, x1]} y dF(y) − α·v2).
pub fn expected_profit(x1: f64, x2: f64, v2: f64, alpha: Level, dist: &PriceDistribution) -> Result<f64> {
    ensure_finite(x1, "x1")?;
    ensure_finite(x2, "x2")?;
    ensure_finite(v2, "v2")?;
    if v2 > x2 {
        return Ok(0.0);
    }
    let a = alpha.value();
    let (f, partial) = dist.cdf_and_partial(x1);
    Ok(x1 * (a - f) + partial - a * v2)
}
