//! Reference forecasting methods: HEAVY and GARCH(1,1) volatility
//! recursions fitted by quasi-maximum likelihood with scaled Student-t
//! forecasts, and historical simulation.

mod data;
mod distribution;
mod historical;
pub mod optim;
mod qml;
mod rolling;

pub use data::{log_returns, MarketData};
pub use distribution::{scaled_t_var_es, student_t_es, student_t_quantile, ScaledT, StudentTSampler};
pub use historical::hs_forecast;
pub use qml::{filter_variance, fit_qml, forecast_variance, simulate_process, Driver, QmlFit, VolatilityModelParams};
pub use rolling::{
    first_trading_days, rolling_evaluation, summarize, FitRecord, ForecastSummary, ModelForecasts, ModelKind,
    RefitRule, RollingConfig,
};

