//! Consistent scoring functions for the pair (VaR_α, ES_α).
//!
//! The general family is
//!
//! ```text
//! S(x1, x2, y) = (1{y ≤ x1} − α)(G1(x1) − G1(y))
//!              + G2(x2)((1/α)·1{y ≤ x1}(x1 − y) − (x1 − x2))
//!              − (𝒢2(x2) − 𝒢2(y))
//! ```
//!
//! with G1 and G2 nondecreasing, G2 ≥ 0 and 𝒢2' = G2. Every member is a
//! mixture of the two elementary scores [`elementary_score_v1`] and
//! [`elementary_score_v2`], which is what makes Murphy diagrams possible.
//!
//! All indicators use closed inequalities (`y <= x1`, `v <= x`).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Probability level α of the VaR/ES pair, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Level(f64);

impl Level {
    pub const DEFAULT: Level = Level(0.025);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Level(alpha))
        } else {
            Err(Error::InvalidLevel(alpha))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Level {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl TryFrom<f64> for Level {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Level::new(v)
    }
}

impl From<Level> for f64 {
    fn from(l: Level) -> f64 {
        l.0
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A joint (VaR, ES) forecast. Construction enforces `var >= es`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawForecast")]
pub struct JointForecast {
    var: f64,
    es: f64,
}

#[derive(Deserialize)]
struct RawForecast {
    var: f64,
    es: f64,
}

impl TryFrom<RawForecast> for JointForecast {
    type Error = Error;
    fn try_from(r: RawForecast) -> Result<Self> {
        JointForecast::new(r.var, r.es)
    }
}

impl JointForecast {
    pub fn new(var: f64, es: f64) -> Result<Self> {
        ensure_finite(var, "var forecast")?;
        ensure_finite(es, "es forecast")?;
        if var < es {
            return Err(Error::ActionDomain { var, es });
        }
        Ok(JointForecast { var, es })
    }

    #[inline]
    pub fn var(&self) -> f64 {
        self.var
    }

    #[inline]
    pub fn es(&self) -> f64 {
        self.es
    }

    /// Shifts both components by the same amount, which keeps the pair
    /// inside the action domain.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        JointForecast::new(self.var + delta, self.es + delta)
    }
}

/// Which elementary-score family a threshold grid indexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GridKind {
    /// Thresholds v1 of the quantile-type score S_{v1}.
    V1,
    /// Thresholds v2 of the ES-type score S_{v2}.
    V2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGrid {
    values: Vec<f64>,
    kind: GridKind,
}

impl ThresholdGrid {
    pub fn new(values: Vec<f64>, kind: GridKind) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("threshold grid must be nonempty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("threshold grid"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("threshold grid must be strictly increasing"));
        }
        Ok(ThresholdGrid { values, kind })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `n` equally spaced thresholds spanning the range of every supplied
/// forecast component and realization, endpoints included.
pub fn build_threshold_grid(
    all_forecast_values: &[f64],
    realizations: &[f64],
    n: usize,
    kind: GridKind,
) -> Result<ThresholdGrid> {
    if n < 2 {
        return Err(Error::invalid(format!("grid size must be at least 2, got {n}")));
    }
    if all_forecast_values.is_empty() || realizations.is_empty() {
        return Err(Error::invalid("grid construction needs forecasts and realizations"));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in all_forecast_values.iter().chain(realizations) {
        ensure_finite(x, "grid input")?;
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if hi <= lo {
        return Err(Error::DegenerateGrid { min: lo, max: hi });
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut values: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
    values[n - 1] = hi;
    ThresholdGrid::new(values, kind)
}

#[inline]
fn indicator(cond: bool) -> f64 {
    if cond {
        1.0
    } else {
        0.0
    }
}

/// Limit of S_{v2} as v2 → −∞: (1/α)(1{y ≤ x1} − α)(x1 − y).
#[inline]
pub fn lower_limit_score(x1: f64, y: f64, alpha: Level) -> f64 {
    let a = alpha.value();
    (indicator(y <= x1) - a) * (x1 - y) / a
}

/// S_{v1}(x1, y) = (1{y ≤ x1} − α)(1{v1 ≤ x1} − 1{v1 ≤ y}).
pub fn elementary_score_v1(x1: f64, y: f64, v1: f64, alpha: Level) -> Result<f64> {
    ensure_finite(x1, "x1")?;
    ensure_finite(y, "y")?;
    ensure_finite(v1, "v1")?;
    Ok(v1_unchecked(x1, y, v1, alpha.value()))
}

#[inline]
pub(crate) fn v1_unchecked(x1: f64, y: f64, v1: f64, alpha: f64) -> f64 {
    (indicator(y <= x1) - alpha) * (indicator(v1 <= x1) - indicator(v1 <= y))
}

/// S_{v2}(x1, x2, y) = 1{v2 ≤ x2}((1/α)1{y ≤ x1}(x1 − y) − (x1 − v2)) + 1{v2 ≤ y}(y − v2).
///
/// When both indicators are active the v2 terms cancel, and that branch is
/// evaluated as [`lower_limit_score`] so the limit identity holds exactly.
pub fn elementary_score_v2(fc: &JointForecast, y: f64, v2: f64, alpha: Level) -> Result<f64> {
    ensure_finite(y, "y")?;
    ensure_finite(v2, "v2")?;
    Ok(v2_unchecked(fc.var, fc.es, y, v2, alpha.value()))
}

#[inline]
pub(crate) fn v2_unchecked(x1: f64, x2: f64, y: f64, v2: f64, alpha: f64) -> f64 {
    let hit = indicator(y <= x1);
    match (v2 <= x2, v2 <= y) {
        (true, true) => (hit - alpha) * (x1 - y) / alpha,
        (true, false) => hit * (x1 - y) / alpha - (x1 - v2),
        (false, true) => y - v2,
        (false, false) => 0.0,
    }
}

/// Elementary score of either family, dispatched on the grid kind.
#[inline]
pub(crate) fn elementary_unchecked(kind: GridKind, fc: &JointForecast, y: f64, v: f64, alpha: f64) -> f64 {
    match kind {
        GridKind::V1 => v1_unchecked(fc.var, y, v, alpha),
        GridKind::V2 => v2_unchecked(fc.var, fc.es, y, v, alpha),
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The three function handles (G1, G2, 𝒢2) that pick a member of the
/// general family. Monotonicity and G2 ≥ 0 cannot be checked for arbitrary
/// closures; they are the caller's responsibility.
#[derive(Clone)]
pub struct FzSpec {
    g1: ScalarFn,
    g2: ScalarFn,
    g2_antiderivative: ScalarFn,
}

impl fmt::Debug for FzSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FzSpec").finish_non_exhaustive()
    }
}

impl FzSpec {
    pub fn new(
        g1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g2_antiderivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FzSpec {
            g1: Arc::new(g1),
            g2: Arc::new(g2),
            g2_antiderivative: Arc::new(g2_antiderivative),
        }
    }

    /// G1 = 0, G2 = logistic, 𝒢2 = softplus. Strictly consistent.
    pub fn logistic() -> Self {
        FzSpec::new(
            |_| 0.0,
            |z| 1.0 / (1.0 + (-z).exp()),
            |z: f64| if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() },
        )
    }

    /// The step-function member induced by discrete mixing measures:
    /// G2(x) = Σ_{v ≤ x} w, 𝒢2(x) = Σ w·(x − v)⁺ and likewise G1 from `h1`.
    pub fn from_mixture(h2: &DiscreteMixture, h1: Option<&DiscreteMixture>) -> Self {
        let h2_pts = h2.points.clone();
        let h2_pts_anti = h2.points.clone();
        let h1_pts = h1.map(|m| m.points.clone()).unwrap_or_default();
        FzSpec::new(
            move |x| h1_pts.iter().filter(|(v, _)| *v <= x).map(|(_, w)| w).sum(),
            move |x| h2_pts.iter().filter(|(v, _)| *v <= x).map(|(_, w)| w).sum(),
            move |x| h2_pts_anti.iter().map(|(v, w)| w * (x - v).max(0.0)).sum(),
        )
    }

    pub fn g1(&self, x: f64) -> f64 {
        (self.g1)(x)
    }

    pub fn g2(&self, x: f64) -> f64 {
        (self.g2)(x)
    }

    pub fn g2_antiderivative(&self, x: f64) -> f64 {
        (self.g2_antiderivative)(x)
    }
}

/// General member of the consistent family.
pub fn fz_score(fc: &JointForecast, y: f64, alpha: Level, spec: &FzSpec) -> Result<f64> {
    ensure_finite(y, "y")?;
    let (x1, x2, a) = (fc.var, fc.es, alpha.value());
    let hit = indicator(y <= x1);
    let g1 = ensure_finite(spec.g1(x1), "G1(x1)")? - ensure_finite(spec.g1(y), "G1(y)")?;
    let g2 = ensure_finite(spec.g2(x2), "G2(x2)")?;
    let big_g2 = ensure_finite(spec.g2_antiderivative(x2), "𝒢2(x2)")?
        - ensure_finite(spec.g2_antiderivative(y), "𝒢2(y)")?;
    Ok((hit - a) * g1 + g2 * (hit * (x1 - y) / a - (x1 - x2)) - big_g2)
}

/// Discretized mixing measure: a list of (threshold, weight) atoms.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMixture {
    points: Vec<(f64, f64)>,
}

impl DiscreteMixture {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        for &(v, w) in &points {
            ensure_finite(v, "mixture threshold")?;
            ensure_finite(w, "mixture weight")?;
            if w < 0.0 {
                return Err(Error::invalid(format!("negative mixture weight {w} at v = {v}")));
            }
        }
        Ok(DiscreteMixture { points })
    }

    pub fn empty() -> Self {
        DiscreteMixture::default()
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

/// ∫ S_{v1} dH1 + ∫ S_{v2} dH2 for discrete mixing measures. Omitting `h1`
/// gives a member of the ES-focused subclass.
pub fn mixture_score(
    fc: &JointForecast,
    y: f64,
    alpha: Level,
    h2: &DiscreteMixture,
    h1: Option<&DiscreteMixture>,
) -> Result<f64> {
    ensure_finite(y, "y")?;
    let a = alpha.value();
    let mut total = 0.0;
    for &(v, w) in &h2.points {
        if w < 0.0 {
            return Err(Error::invalid("negative mixture weight"));
        }
        total += w * v2_unchecked(fc.var, fc.es, y, v, a);
    }
    if let Some(h1) = h1 {
        for &(v, w) in &h1.points {
            if w < 0.0 {
                return Err(Error::invalid("negative mixture weight"));
            }
            total += w * v1_unchecked(fc.var, y, v, a);
        }
    }
    Ok(total)
}
