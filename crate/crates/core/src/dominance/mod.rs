//! Permutation test of forecast dominance.
//!
//! H0: method A weakly dominates method B, i.e. A's expected elementary
//! score is no larger than B's at every threshold. The pipeline computes
//! one-sided pointwise t-tests on the A-minus-B score differences,
//! simulates the null by flipping the sign of whole rows (relabeling A and
//! B per period or per block), adjusts with the Westfall–Young step-down
//! procedure and reports the minimal adjusted p-value.

mod variance;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

pub use variance::{newey_west_variance, VarianceEstimator, VarianceKind};

use crate::error::{Error, Result};
use crate::murphy::{period_diffs, EvaluationSeries};
use crate::normal;
use crate::rng::substream;
use crate::scores::{GridKind, Level, ThresholdGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScoreSet {
    /// ES-type elementary scores S_{v2} only.
    S2Only,
    /// Quantile-type S_{v1} and ES-type S_{v2} thresholds, V1 columns first.
    BothFamilies,
}

/// Reference distribution of the pointwise t-statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Reference {
    Normal,
    /// Student-t with T − 1 degrees of freedom.
    StudentT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "A_dominates_B")]
    ADominatesB,
    #[serde(rename = "B_dominates_A")]
    BDominatesA,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::ADominatesB => "A_dominates_B",
            Direction::BDominatesA => "B_dominates_A",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceTestConfig {
    pub alpha_level: Level,
    pub grid_size: usize,
    /// Number L of sign-flip replicates.
    pub permutations: usize,
    pub block_length: usize,
    pub variance: VarianceEstimator,
    pub score_set: ScoreSet,
    pub reference: Reference,
    pub seed: u64,
}

impl Default for DominanceTestConfig {
    fn default() -> Self {
        DominanceTestConfig {
            alpha_level: Level::DEFAULT,
            grid_size: 50,
            permutations: 500,
            block_length: 1,
            variance: VarianceEstimator::iid(),
            score_set: ScoreSet::S2Only,
            reference: Reference::Normal,
            seed: 0,
        }
    }
}

impl DominanceTestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.permutations < 1 {
            return Err(Error::invalid("permutations must be at least 1"));
        }
        if self.block_length < 1 {
            return Err(Error::invalid("block length must be at least 1"));
        }
        if self.grid_size < 2 {
            return Err(Error::invalid("grid size must be at least 2"));
        }
        Ok(())
    }
}

/// T × M matrix of per-period score differences, stored by column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreDiffPanel {
    rows: usize,
    columns: Vec<Vec<f64>>,
}

impl ScoreDiffPanel {
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("panel columns differ in length".into()));
        }
        if columns.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("score difference"));
        }
        Ok(ScoreDiffPanel { rows, columns })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch("panel rows differ in length".into()));
        }
        ScoreDiffPanel::from_columns((0..m).map(|j| rows.iter().map(|r| r[j]).collect()).collect())
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, m: usize) -> &[f64] {
        &self.columns[m]
    }

    pub fn get(&self, t: usize, m: usize) -> f64 {
        self.columns[m][t]
    }

    pub fn row(&self, t: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[t]).collect()
    }

    pub fn negated(&self) -> ScoreDiffPanel {
        ScoreDiffPanel { rows: self.rows, columns: self.columns.iter().map(|c| c.iter().map(|x| -x).collect()).collect() }
    }

    /// Multiplies row t by `signs[t]`.
    pub fn with_row_signs(&self, signs: &[f64]) -> Result<ScoreDiffPanel> {
        if signs.len() != self.rows {
            return Err(Error::DimensionMismatch(format!("{} signs for {} rows", signs.len(), self.rows)));
        }
        let columns = self.columns.iter().map(|c| c.iter().zip(signs).map(|(x, s)| s * x).collect()).collect();
        Ok(ScoreDiffPanel { rows: self.rows, columns })
    }
}

/// The threshold grids used for `score_set`: one V2 grid, or a V1 grid
/// followed by a V2 grid, all spanning the same range.
pub fn test_grids(series: &EvaluationSeries, grid_size: usize, score_set: ScoreSet) -> Result<Vec<ThresholdGrid>> {
    match score_set {
        ScoreSet::S2Only => Ok(vec![series.grid(grid_size, GridKind::V2)?]),
        ScoreSet::BothFamilies => Ok(vec![series.grid(grid_size, GridKind::V1)?, series.grid(grid_size, GridKind::V2)?]),
    }
}

/// A-minus-B score differences for every threshold of `grids`, in order.
pub fn diff_panel_on_grids(series: &EvaluationSeries, grids: &[ThresholdGrid], alpha: Level) -> Result<ScoreDiffPanel> {
    let cols: Vec<(GridKind, f64)> = grids.iter().flat_map(|g| g.values().iter().map(move |&v| (g.kind(), v))).collect();
    let columns = cols
        .par_iter()
        .map(|&(kind, v)| period_diffs(series, kind, v, alpha.value()))
        .collect::<Result<Vec<_>>>()?;
    ScoreDiffPanel::from_columns(columns)
}

/// Score-difference panel and the grids indexing its columns.
pub fn compute_diff_panel(
    series: &EvaluationSeries,
    config: &DominanceTestConfig,
) -> Result<(ScoreDiffPanel, Vec<ThresholdGrid>)> {
    config.validate()?;
    let grids = test_grids(series, config.grid_size, config.score_set)?;
    let panel = diff_panel_on_grids(series, &grids, config.alpha_level)?;
    Ok((panel, grids))
}

/// Computes t-statistics and upper-tail p-values with one shared reference.
struct PointwiseTester {
    variance: VarianceEstimator,
    student: Option<StudentsT>,
}

impl PointwiseTester {
    fn new(rows: usize, variance: VarianceEstimator, reference: Reference) -> Result<Self> {
        let required = variance.min_len();
        if rows < required {
            return Err(Error::InsufficientData { required, actual: rows });
        }
        let student = match reference {
            Reference::Normal => None,
            Reference::StudentT => Some(
                StudentsT::new(0.0, 1.0, (rows - 1) as f64)
                    .map_err(|e| Error::invalid(format!("student-t reference: {e}")))?,
            ),
        };
        Ok(PointwiseTester { variance, student })
    }

    /// mean/se, or `None` for a degenerate (constant or zero-variance) column.
    fn statistic(&self, x: &[f64]) -> Result<Option<f64>> {
        if x.iter().all(|v| *v == x[0]) {
            return Ok(None);
        }
        let var = self.variance.variance_of_mean(x)?;
        if !(var > 0.0) {
            return Ok(None);
        }
        Ok(Some(variance::mean(x) / var.sqrt()))
    }

    /// 1 − F(stat); degenerate columns give 1.
    fn upper_p(&self, stat: Option<f64>) -> f64 {
        match (stat, &self.student) {
            (None, _) => 1.0,
            (Some(s), None) => normal::sf(s),
            (Some(s), Some(t)) => t.sf(s),
        }
    }
}

/// One-sided p-values 1 − Φ(mean/se) per column: a large positive mean
/// difference (A scores worse) gives a small p-value.
pub fn pointwise_p_values(panel: &ScoreDiffPanel, variance: VarianceEstimator, reference: Reference) -> Result<Vec<f64>> {
    let tester = PointwiseTester::new(panel.n_rows(), variance, reference)?;
    panel.columns.iter().map(|c| Ok(tester.upper_p(tester.statistic(c)?))).collect()
}

/// Draws one ±1 sign per block of `block_length` consecutive rows; the last
/// block may be shorter and gets its own sign.
pub fn draw_block_signs<R: RngCore + ?Sized>(rows: usize, block_length: usize, rng: &mut R) -> Result<Vec<f64>> {
    if block_length < 1 {
        return Err(Error::invalid("block length must be at least 1"));
    }
    let blocks = rows.div_ceil(block_length);
    let block_signs: Vec<f64> = (0..blocks).map(|_| if rng.next_u64() >> 63 == 1 { -1.0 } else { 1.0 }).collect();
    Ok((0..rows).map(|t| block_signs[t / block_length]).collect())
}

/// The panel with every row of each block multiplied by a common random sign.
pub fn sign_permutation<R: RngCore + ?Sized>(
    panel: &ScoreDiffPanel,
    block_length: usize,
    rng: &mut R,
) -> Result<ScoreDiffPanel> {
    let signs = draw_block_signs(panel.n_rows(), block_length, rng)?;
    panel.with_row_signs(&signs)
}

fn ascending_order(observed: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..observed.len()).collect();
    order.sort_by(|&a, &b| observed[a].total_cmp(&observed[b]));
    order
}

fn check_wy_inputs(observed: &[f64], simulated: &[Vec<f64>]) -> Result<()> {
    if observed.is_empty() {
        return Err(Error::invalid("no observed p-values"));
    }
    if simulated.is_empty() {
        return Err(Error::invalid("at least one simulated replicate is required"));
    }
    if let Some(l) = simulated.iter().position(|r| r.len() != observed.len()) {
        return Err(Error::DimensionMismatch(format!(
            "replicate {l} has {} p-values, expected {}",
            simulated[l].len(),
            observed.len()
        )));
    }
    Ok(())
}

/// Step-down rejection frequencies before monotonicity is enforced:
/// with σ sorting the observed p ascending (ties by index) and
/// q*_k = min{p*_{σ(s)} : s ≥ k} the suffix minima of each replicate,
/// r_{σ(k)} = (1/L) Σ_l 1(q*_{k,l} ≤ p_{σ(k)}).
pub fn westfall_young_raw(observed: &[f64], simulated: &[Vec<f64>]) -> Result<Vec<f64>> {
    check_wy_inputs(observed, simulated)?;
    let m = observed.len();
    let order = ascending_order(observed);
    let mut counts = vec![0usize; m];
    let mut q = vec![0.0; m];
    for rep in simulated {
        let mut running = f64::INFINITY;
        for k in (0..m).rev() {
            running = running.min(rep[order[k]]);
            q[k] = running;
        }
        debug_assert!(q.windows(2).all(|w| w[0] <= w[1]), "suffix minima must be nondecreasing along σ");
        for k in 0..m {
            if q[k] <= observed[order[k]] {
                counts[k] += 1;
            }
        }
    }
    let mut r = vec![0.0; m];
    for k in 0..m {
        r[order[k]] = counts[k] as f64 / simulated.len() as f64;
    }
    Ok(r)
}

/// Westfall–Young step-down adjusted p-values: the raw frequencies of
/// [`westfall_young_raw`] made nondecreasing along σ by a running maximum.
pub fn westfall_young_adjust(observed: &[f64], simulated: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut r = westfall_young_raw(observed, simulated)?;
    let mut running: f64 = 0.0;
    for &i in &ascending_order(observed) {
        running = running.max(r[i]);
        r[i] = running;
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceTestResult {
    pub direction: Direction,
    pub grids: Vec<ThresholdGrid>,
    pub pointwise_p: Vec<f64>,
    pub adjusted_p: Vec<f64>,
    pub minimal_wy_p: f64,
    /// Set when both score families are tested with i.i.d. variances; the
    /// quantile-type score differences can be strongly serially dependent.
    pub dependence_warning: bool,
}

impl DominanceTestResult {
    /// H0 is rejected when the minimal adjusted p-value is below `level`.
    pub fn rejects(&self, level: f64) -> bool {
        self.minimal_wy_p < level
    }
}

/// Runs both directions of the test on a precomputed A-minus-B panel.
/// Replicate l draws its signs from stream l of `config.seed`; the same
/// signs serve both directions.
pub fn dominance_test_on_panel(
    panel: &ScoreDiffPanel,
    grids: &[ThresholdGrid],
    config: &DominanceTestConfig,
) -> Result<(DominanceTestResult, DominanceTestResult)> {
    config.validate()?;
    if panel.n_cols() != grids.iter().map(ThresholdGrid::len).sum::<usize>() {
        return Err(Error::DimensionMismatch("panel columns do not match the grids".into()));
    }
    let tester = PointwiseTester::new(panel.n_rows(), config.variance, config.reference)?;
    let both_p = |p: &ScoreDiffPanel| -> Result<(Vec<f64>, Vec<f64>)> {
        let mut forward = Vec::with_capacity(p.n_cols());
        let mut reverse = Vec::with_capacity(p.n_cols());
        for c in &p.columns {
            let stat = tester.statistic(c)?;
            forward.push(tester.upper_p(stat));
            reverse.push(tester.upper_p(stat.map(|s| -s)));
        }
        Ok((forward, reverse))
    };
    let (obs_forward, obs_reverse) = both_p(panel)?;

    let replicates: Vec<(Vec<f64>, Vec<f64>)> = (0..config.permutations as u64)
        .into_par_iter()
        .map(|l| {
            let mut rng = substream(config.seed, l);
            both_p(&sign_permutation(panel, config.block_length, &mut rng)?)
        })
        .collect::<Result<_>>()?;
    let (sim_forward, sim_reverse): (Vec<_>, Vec<_>) = replicates.into_iter().unzip();

    let dependence_warning =
        config.score_set == ScoreSet::BothFamilies && config.variance.kind == VarianceKind::Iid;
    let finish = |direction, observed: Vec<f64>, simulated: &[Vec<f64>]| -> Result<DominanceTestResult> {
        let adjusted_p = westfall_young_adjust(&observed, simulated)?;
        let minimal_wy_p = adjusted_p.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(DominanceTestResult {
            direction,
            grids: grids.to_vec(),
            pointwise_p: observed,
            adjusted_p,
            minimal_wy_p,
            dependence_warning,
        })
    };
    Ok((
        finish(Direction::ADominatesB, obs_forward, &sim_forward)?,
        finish(Direction::BDominatesA, obs_reverse, &sim_reverse)?,
    ))
}

/// Tests H0 "A weakly dominates B" and H0 "B weakly dominates A".
pub fn dominance_test(
    series: &EvaluationSeries,
    config: &DominanceTestConfig,
) -> Result<(DominanceTestResult, DominanceTestResult)> {
    let (panel, grids) = compute_diff_panel(series, config)?;
    dominance_test_on_panel(&panel, &grids, config)
}

/// JSON document with the configuration and both directions' results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub config: DominanceTestConfig,
    pub results: Vec<DominanceTestResult>,
    pub notes: Vec<String>,
}

impl DominanceReport {
    pub fn new(config: DominanceTestConfig, results: (DominanceTestResult, DominanceTestResult)) -> Self {
        let mut notes = vec!["dominance is assessed at the grid thresholds only".to_string()];
        if results.0.dependence_warning {
            notes.push(
                "both score families with i.i.d. variances: quantile-type score differences may be serially \
                 dependent, so small p-values should be read with care"
                    .to_string(),
            );
        }
        DominanceReport { config, results: vec![results.0, results.1], notes }
    }
}
