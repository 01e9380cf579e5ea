//! Rolling-window out-of-sample forecasting with monthly refits.
//!
//! For each out-of-sample day the forecast only uses the `window` returns
//! before it. Volatility models are refitted on the first trading day of
//! every calendar month (and once at the start of the out-of-sample range
//! if that is not such a day); between refits the latest parameters are
//! reused and the variance recursion is re-run over the trailing window.

use chrono::{Datelike, NaiveDate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::{log_returns, MarketData};
use super::distribution::ScaledT;
use super::historical::hs_forecast;
use super::qml::{fit_qml, forecast_variance, Driver, VolatilityModelParams};
use crate::error::{Error, Result};
use crate::murphy::EvaluationSeries;
use crate::scores::{JointForecast, Level};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Heavy,
    Garch,
    Hs,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Heavy => "HEAVY",
            ModelKind::Garch => "GARCH",
            ModelKind::Hs => "HS",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "heavy" => Ok(ModelKind::Heavy),
            "garch" => Ok(ModelKind::Garch),
            "hs" => Ok(ModelKind::Hs),
            other => Err(Error::invalid(format!("unknown model {other:?} (expected heavy, garch or hs)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RefitRule {
    MonthlyFirstTradingDay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingConfig {
    pub window: usize,
    pub refit_rule: RefitRule,
    pub alpha: Level,
    pub nu: u32,
}

impl Default for RollingConfig {
    fn default() -> Self {
        RollingConfig { window: 1500, refit_rule: RefitRule::MonthlyFirstTradingDay, alpha: Level::default(), nu: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub date: NaiveDate,
    pub params: VolatilityModelParams,
    pub converged: bool,
}

/// Out-of-sample forecasts of one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelForecasts {
    pub model: ModelKind,
    pub dates: Vec<NaiveDate>,
    pub forecasts: Vec<JointForecast>,
    pub realizations: Vec<f64>,
    /// First trading days of each month inside the out-of-sample range.
    pub refit_dates: Vec<NaiveDate>,
    /// Every fit actually performed (empty for HS).
    pub fits: Vec<FitRecord>,
    /// Rows removed because their rk value was missing.
    pub dropped_rows: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastSummary {
    pub avg_var: f64,
    pub avg_es: f64,
    pub violation_rate: f64,
    pub n: usize,
}

impl ModelForecasts {
    pub fn summary(&self) -> ForecastSummary {
        summarize(&self.forecasts, &self.realizations)
    }

    /// Single-method evaluation series, times are days since the common era.
    pub fn to_series(&self) -> Result<EvaluationSeries> {
        let times = self.dates.iter().map(|d| d.num_days_from_ce() as i64).collect();
        EvaluationSeries::new(times, self.forecasts.clone(), None, self.realizations.clone())
    }
}

/// Averages of the forecast components and the VaR violation rate
/// (fraction of days with y < VaR).
pub fn summarize(forecasts: &[JointForecast], realizations: &[f64]) -> ForecastSummary {
    let n = forecasts.len().min(realizations.len());
    if n == 0 {
        return ForecastSummary { avg_var: f64::NAN, avg_es: f64::NAN, violation_rate: f64::NAN, n: 0 };
    }
    let avg_var = forecasts[..n].iter().map(|f| f.var()).sum::<f64>() / n as f64;
    let avg_es = forecasts[..n].iter().map(|f| f.es()).sum::<f64>() / n as f64;
    let hits = forecasts[..n].iter().zip(realizations).filter(|(f, y)| **y < f.var()).count();
    ForecastSummary { avg_var, avg_es, violation_rate: hits as f64 / n as f64, n }
}

/// Indices t (into the return series) at which a new month starts, for t in `range`.
/// `return_dates[t]` is the date on which return t is realized.
pub fn first_trading_days(return_dates: &[NaiveDate], range: std::ops::Range<usize>) -> Vec<usize> {
    range
        .filter(|&t| {
            t == 0 || {
                let (a, b) = (return_dates[t - 1], return_dates[t]);
                (a.year(), a.month()) != (b.year(), b.month())
            }
        })
        .collect()
}

pub fn rolling_evaluation(data: &MarketData, model: ModelKind, config: &RollingConfig) -> Result<ModelForecasts> {
    if config.window < 2 {
        return Err(Error::invalid(format!("window must be at least 2, got {}", config.window)));
    }
    let (data, dropped_rows) = match model {
        ModelKind::Heavy => {
            if !data.has_rk() {
                return Err(Error::Data { line: 1, message: "HEAVY needs an `rk` column in the input data".into() });
            }
            let (clean, dropped) = data.drop_missing_rk();
            if dropped > 0 {
                log::warn!("dropped {dropped} rows with missing rk for HEAVY");
            }
            (clean, dropped)
        }
        _ => (data.clone(), 0),
    };

    let returns = log_returns(&data)?;
    let return_dates = &data.dates()[1..];
    let w = config.window;
    if returns.len() <= w {
        return Err(Error::InsufficientData { required: w + 1, actual: returns.len() });
    }
    let oos = w..returns.len();
    let refit_idx = first_trading_days(return_dates, oos.clone());
    let refit_dates: Vec<NaiveDate> = refit_idx.iter().map(|&t| return_dates[t]).collect();

    let (dates, forecasts, fits) = match model {
        ModelKind::Hs => {
            let forecasts = oos
                .clone()
                .into_par_iter()
                .map(|t| hs_forecast(&returns[t - w..t], config.alpha))
                .collect::<Result<Vec<_>>>()?;
            (oos.clone().map(|t| return_dates[t]).collect(), forecasts, Vec::new())
        }
        ModelKind::Heavy | ModelKind::Garch => {
            let (driver_kind, drivers): (Driver, Vec<f64>) = if model == ModelKind::Heavy {
                let rk = data.rk().expect("checked above");
                (Driver::RealizedKernel, rk[1..].iter().map(|v| v.expect("missing rows dropped")).collect())
            } else {
                (Driver::SquaredReturn, returns.iter().map(|r| r * r).collect())
            };
            let mut fit_idx = refit_idx.clone();
            if fit_idx.first() != Some(&oos.start) {
                fit_idx.insert(0, oos.start);
            }
            let fits = fit_idx
                .par_iter()
                .map(|&t| {
                    let r = &returns[t - w..t];
                    let d = &drivers[t - w..t];
                    match fit_qml(r, d, driver_kind) {
                        Ok(fit) => Ok(FitRecord { date: return_dates[t], params: fit.params, converged: true }),
                        Err(Error::NonConvergence { best, iterations, .. }) => {
                            log::warn!(
                                "{} fit for {} stopped after {iterations} iterations; using best parameters",
                                model.name(),
                                return_dates[t]
                            );
                            Ok(FitRecord { date: return_dates[t], params: best, converged: false })
                        }
                        Err(e) => Err(e),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let scaled = ScaledT::new(config.alpha, config.nu)?;
            let forecasts = oos
                .clone()
                .into_par_iter()
                .map(|t| {
                    // Latest fit performed on or before day t.
                    let k = fit_idx.partition_point(|&f| f <= t) - 1;
                    let mut params = fits[k].params;
                    params.nu = config.nu;
                    let s2 = forecast_variance(&params, &returns[t - w..t], &drivers[t - w..t])?;
                    scaled.forecast(s2.sqrt())
                })
                .collect::<Result<Vec<_>>>()?;
            (oos.clone().map(|t| return_dates[t]).collect(), forecasts, fits)
        }
    };

    Ok(ModelForecasts {
        model,
        dates,
        forecasts,
        realizations: returns[oos].to_vec(),
        refit_dates,
        fits,
        dropped_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use chrono::Days;
    use rand::RngCore;

    fn business_days(start: &str, n: usize) -> Vec<NaiveDate> {
        let mut d = NaiveDate::parse_from_str(start, "%Y-%m-%d").unwrap();
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            if d.weekday().num_days_from_monday() < 5 {
                out.push(d);
            }
            d = d + Days::new(1);
        }
        out
    }

    fn synthetic(n: usize, seed: u64, with_rk: bool) -> MarketData {
        let mut rng = substream(seed, 0);
        let mut p = 100.0;
        let mut close = Vec::with_capacity(n);
        let mut rk = Vec::with_capacity(n);
        for _ in 0..n {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            let r = (u - 0.5) * 0.04;
            p *= r.exp();
            close.push(p);
            rk.push(Some((100.0 * r).powi(2) + 0.1));
        }
        MarketData::new(business_days("2010-01-04", n), close, with_rk.then_some(rk)).unwrap()
    }

    #[test]
    fn hs_window_arithmetic_and_constant_data() {
        let data = synthetic(1601, 3, false);
        let cfg = RollingConfig::default();
        let out = rolling_evaluation(&data, ModelKind::Hs, &cfg).unwrap();
        assert_eq!(out.forecasts.len(), 100);
        assert_eq!(out.dates.len(), 100);

        let flat = MarketData::new(business_days("2010-01-04", 40), vec![50.0; 40], None).unwrap();
        let cfg = RollingConfig { window: 10, ..Default::default() };
        let out = rolling_evaluation(&flat, ModelKind::Hs, &cfg).unwrap();
        assert!(out.forecasts.iter().all(|f| f.var() == 0.0 && f.es() == 0.0));
    }

    #[test]
    fn realization_never_enters_its_own_forecast() {
        let data = synthetic(400, 5, false);
        let cfg = RollingConfig { window: 100, ..Default::default() };
        let base = rolling_evaluation(&data, ModelKind::Hs, &cfg).unwrap();
        // Crash the last price: only the last realization may change.
        let mut close = data.close().to_vec();
        *close.last_mut().unwrap() *= 0.5;
        let shocked = MarketData::new(data.dates().to_vec(), close, None).unwrap();
        let out = rolling_evaluation(&shocked, ModelKind::Hs, &cfg).unwrap();
        assert_eq!(base.forecasts, out.forecasts);
        assert_ne!(base.realizations.last(), out.realizations.last());
    }

    #[test]
    fn heavy_equals_garch_when_rk_is_squared_return() {
        let data = synthetic(700, 9, false);
        let r = log_returns(&data).unwrap();
        let mut rk = vec![Some(1.0)];
        rk.extend(r.iter().map(|x| Some(x * x)));
        let with_rk = MarketData::new(data.dates().to_vec(), data.close().to_vec(), Some(rk)).unwrap();
        let cfg = RollingConfig { window: 500, ..Default::default() };
        let heavy = rolling_evaluation(&with_rk, ModelKind::Heavy, &cfg).unwrap();
        let garch = rolling_evaluation(&with_rk, ModelKind::Garch, &cfg).unwrap();
        assert_eq!(heavy.forecasts, garch.forecasts);
    }

    #[test]
    fn heavy_without_rk_is_an_error() {
        let data = synthetic(700, 9, false);
        assert!(rolling_evaluation(&data, ModelKind::Heavy, &RollingConfig { window: 500, ..Default::default() }).is_err());
    }

    #[test]
    fn refit_schedule_is_first_trading_day_of_each_month() {
        let data = synthetic(900, 2, true);
        let cfg = RollingConfig { window: 600, ..Default::default() };
        let out = rolling_evaluation(&data, ModelKind::Garch, &cfg).unwrap();
        let mut expected = Vec::new();
        for (i, d) in out.dates.iter().enumerate() {
            let prev = if i == 0 { data.dates()[600] } else { out.dates[i - 1] };
            if (prev.year(), prev.month()) != (d.year(), d.month()) {
                expected.push(*d);
            }
        }
        assert!(!expected.is_empty());
        assert_eq!(out.refit_dates, expected);
        let fit_dates: Vec<NaiveDate> = out.fits.iter().map(|f| f.date).collect();
        assert!(expected.iter().all(|d| fit_dates.contains(d)));
        assert_eq!(fit_dates[0], out.dates[0]);
    }

    #[test]
    fn model_names_parse() {
        assert_eq!("HEAVY".parse::<ModelKind>().unwrap(), ModelKind::Heavy);
        assert!("arima".parse::<ModelKind>().is_err());
    }
}
