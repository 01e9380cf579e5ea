//! Daily market data: closing levels and (optionally) a realized kernel.
//!
//! CSV layout: header row with `date` (ISO-8601), `close` and an optional
//! `rk` column. The realized kernel must already be on the squared scale of
//! 100×log returns. Empty, `NA` or `NaN` rk cells are treated as missing.

use std::io::Read;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketData {
    dates: Vec<NaiveDate>,
    close: Vec<f64>,
    rk: Option<Vec<Option<f64>>>,
}

impl MarketData {
    pub fn new(dates: Vec<NaiveDate>, close: Vec<f64>, rk: Option<Vec<Option<f64>>>) -> Result<Self> {
        if dates.len() != close.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} dates but {} closing prices",
                dates.len(),
                close.len()
            )));
        }
        if let Some(rk) = &rk {
            if rk.len() != dates.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} dates but {} rk values",
                    dates.len(),
                    rk.len()
                )));
            }
            if let Some(i) = rk.iter().position(|v| v.is_some_and(|x| !(x >= 0.0) || !x.is_finite())) {
                return Err(Error::Data { line: i + 2, message: "rk must be finite and nonnegative".into() });
            }
        }
        if let Some(i) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::Data { line: i + 3, message: "dates must be strictly increasing".into() });
        }
        if let Some(i) = close.iter().position(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(Error::Data { line: i + 2, message: format!("nonpositive closing price {}", close[i]) });
        }
        Ok(MarketData { dates, close, rk })
    }

    /// Parses the CSV format described in the module docs.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Data { line: 1, message: e.to_string() })?
            .clone();
        let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
        let date_col = col("date").ok_or(Error::Data { line: 1, message: "missing `date` column".into() })?;
        let close_col = col("close").ok_or(Error::Data { line: 1, message: "missing `close` column".into() })?;
        let rk_col = col("rk");

        let mut dates = Vec::new();
        let mut close = Vec::new();
        let mut rk = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Data {
                line: e.position().map_or(0, |p| p.line() as usize),
                message: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            let field = |i: usize| rec.get(i).unwrap_or("");
            let date = NaiveDate::parse_from_str(field(date_col), "%Y-%m-%d")
                .map_err(|e| Error::Data { line, message: format!("bad date {:?}: {e}", field(date_col)) })?;
            let price: f64 = field(close_col)
                .parse()
                .map_err(|_| Error::Data { line, message: format!("bad close {:?}", field(close_col)) })?;
            if !(price > 0.0) || !price.is_finite() {
                return Err(Error::Data { line, message: format!("nonpositive closing price {price}") });
            }
            if let Some(&last) = dates.last() {
                if date <= last {
                    return Err(Error::Data { line, message: format!("date {date} is not after {last}") });
                }
            }
            if let Some(c) = rk_col {
                let raw = field(c);
                let value = if raw.is_empty() || raw.eq_ignore_ascii_case("na") || raw.eq_ignore_ascii_case("nan") {
                    None
                } else {
                    let v: f64 = raw.parse().map_err(|_| Error::Data { line, message: format!("bad rk {raw:?}") })?;
                    if !(v >= 0.0) || !v.is_finite() {
                        return Err(Error::Data { line, message: format!("rk must be nonnegative, got {v}") });
                    }
                    Some(v)
                };
                rk.push(value);
            }
            dates.push(date);
            close.push(price);
        }
        MarketData::new(dates, close, rk_col.map(|_| rk))
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn close(&self) -> &[f64] {
        &self.close
    }

    pub fn rk(&self) -> Option<&[Option<f64>]> {
        self.rk.as_deref()
    }

    pub fn has_rk(&self) -> bool {
        self.rk.is_some()
    }

    /// Removes rows whose rk cell is missing; returns the cleaned data and
    /// the number of dropped rows. Data without an rk column is unchanged.
    pub fn drop_missing_rk(&self) -> (MarketData, usize) {
        let Some(rk) = &self.rk else {
            return (self.clone(), 0);
        };
        let keep: Vec<usize> = (0..self.len()).filter(|&i| rk[i].is_some()).collect();
        let dropped = self.len() - keep.len();
        let out = MarketData {
            dates: keep.iter().map(|&i| self.dates[i]).collect(),
            close: keep.iter().map(|&i| self.close[i]).collect(),
            rk: Some(keep.iter().map(|&i| rk[i]).collect()),
        };
        (out, dropped)
    }
}

/// R_t = 100·(log P_t − log P_{t−1}); one shorter than the price series.
pub fn log_returns(data: &MarketData) -> Result<Vec<f64>> {
    let p = data.close();
    if p.len() < 2 {
        return Err(Error::InsufficientData { required: 2, actual: p.len() });
    }
    if let Some(bad) = p.iter().find(|x| !(**x > 0.0)) {
        return Err(Error::invalid(format!("nonpositive price {bad}")));
    }
    Ok(p.windows(2).map(|w| 100.0 * (w[1].ln() - w[0].ln())).collect())
}
