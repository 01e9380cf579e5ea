//! Command-line front end: rolling forecasts, Murphy diagrams, dominance
//! tests, the size/power study and the option-pricing check.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
//! Commands that write to `--out` finish by writing `manifest.json`, which
//! lists the configuration, input checksums and every artifact produced.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use esmurphy::dominance::{dominance_test, DominanceReport, DominanceTestConfig, Reference, ScoreSet, VarianceEstimator};
use esmurphy::models::{rolling_evaluation, MarketData, ModelKind, RollingConfig};
use esmurphy::murphy::{emit_curve_data, murphy_curve, murphy_diff, CurveFormat, EvaluationSeries, LabeledCurve, Method};
use esmurphy::options::{black_scholes_put_zero_rate, verify_pricing_equivalence, OptionScenario};
use esmurphy::scores::{GridKind, JointForecast, Level};
use esmurphy::simulation::{size_power_study, DgpConfig, RkSource, StudyRow};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<esmurphy::Error> for CliError {
    fn from(e: esmurphy::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else if e.is_data() {
            CliError::Data(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "esmurphy", version, about = "Evaluate and compare joint VaR/ES forecasts")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rolling out-of-sample VaR/ES forecasts from HEAVY, GARCH and HS.
    Evaluate(EvaluateArgs),
    /// Murphy diagrams and the difference curve of two forecast files.
    Murphy(MurphyArgs),
    /// Permutation test of forecast dominance in both directions.
    Test(TestArgs),
    /// Monte Carlo size/power study of the dominance test.
    Simulate(SimulateArgs),
    /// Prices the ES put and compares it with Black–Scholes.
    Price(PriceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Heavy,
    Garch,
    Hs,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Heavy => ModelKind::Heavy,
            ModelArg::Garch => ModelKind::Garch,
            ModelArg::Hs => ModelKind::Hs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceArg {
    Iid,
    Nw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoresArg {
    /// ES-type elementary scores only.
    S2,
    /// Quantile-type and ES-type elementary scores.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceArg {
    Normal,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    V1,
    V2,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    /// CSV with columns date, close and optionally rk.
    #[arg(long)]
    pub input: PathBuf,
    /// Models to run.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![ModelArg::Heavy, ModelArg::Garch, ModelArg::Hs])]
    pub models: Vec<ModelArg>,
    /// Rolling window length in returns.
    #[arg(long, default_value_t = 1500)]
    pub window: usize,
    /// Tail level α.
    #[arg(long, default_value_t = 0.025)]
    pub alpha: f64,
    /// Degrees of freedom of the scaled-t forecasts.
    #[arg(long, default_value_t = 6)]
    pub nu: u32,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MurphyArgs {
    /// Forecast CSV of method A (date,var,es,realization).
    #[arg(long)]
    pub a: PathBuf,
    /// Forecast CSV of method B.
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value = "A")]
    pub label_a: String,
    #[arg(long, default_value = "B")]
    pub label_b: String,
    /// Tail level α.
    #[arg(long, default_value_t = 0.025)]
    pub alpha: f64,
    /// Number of thresholds.
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
    /// Elementary-score family: v1 (quantile-type) or v2 (ES-type).
    #[arg(long, value_enum, default_value_t = KindArg::V2)]
    pub kind: KindArg,
    /// Variance estimator for the pointwise band.
    #[arg(long, value_enum, default_value_t = VarianceArg::Iid)]
    pub variance: VarianceArg,
    /// Newey–West truncation lag.
    #[arg(long, default_value_t = 3)]
    pub lag: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TestOptions {
    /// Tail level α.
    #[arg(long, default_value_t = 0.025)]
    pub alpha: f64,
    /// Thresholds per score family.
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
    /// Sign-flip replicates.
    #[arg(long, default_value_t = 500)]
    pub permutations: usize,
    /// Rows sharing one sign (1 = independent signs).
    #[arg(long, default_value_t = 1)]
    pub block: usize,
    /// Variance estimator of the pointwise t-tests.
    #[arg(long, value_enum, default_value_t = VarianceArg::Iid)]
    pub variance: VarianceArg,
    /// Newey–West truncation lag.
    #[arg(long, default_value_t = 3)]
    pub lag: usize,
    /// Score families to test.
    #[arg(long, value_enum, default_value_t = ScoresArg::S2)]
    pub scores: ScoresArg,
    /// Reference distribution of the t-statistics.
    #[arg(long, value_enum, default_value_t = ReferenceArg::Normal)]
    pub reference: ReferenceArg,
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl TestOptions {
    fn config(&self) -> CliResult<DominanceTestConfig> {
        let config = DominanceTestConfig {
            alpha_level: Level::new(self.alpha)?,
            grid_size: self.grid,
            permutations: self.permutations,
            block_length: self.block,
            variance: variance_estimator(self.variance, self.lag),
            score_set: match self.scores {
                ScoresArg::S2 => ScoreSet::S2Only,
                ScoresArg::Both => ScoreSet::BothFamilies,
            },
            reference: match self.reference {
                ReferenceArg::Normal => Reference::Normal,
                ReferenceArg::T => Reference::StudentT,
            },
            seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct TestArgs {
    /// Forecast CSV of method A (date,var,es,realization).
    #[arg(long)]
    pub a: PathBuf,
    /// Forecast CSV of method B.
    #[arg(long)]
    pub b: PathBuf,
    #[command(flatten)]
    pub options: TestOptions,
    /// Output directory; the JSON report goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Error variances of model 1 (method A).
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0])]
    pub zeta1: Vec<f64>,
    /// Error variance of model 2 (method B).
    #[arg(long, default_value_t = 1.0)]
    pub zeta2: f64,
    /// Sample sizes T.
    #[arg(long, value_delimiter = ',', default_values_t = vec![500])]
    pub horizon: Vec<usize>,
    /// Monte Carlo replications per configuration.
    #[arg(long, default_value_t = 200)]
    pub replications: usize,
    /// Nominal levels at which rejections are counted.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.05, 0.10])]
    pub levels: Vec<f64>,
    /// CSV with an `rk` column; a synthetic lognormal AR(1) is used when omitted.
    #[arg(long)]
    pub rk_file: Option<PathBuf>,
    /// Degrees of freedom of the simulated t innovations.
    #[arg(long, default_value_t = 6)]
    pub nu: u32,
    #[command(flatten)]
    pub options: TestOptions,
    /// Output directory; the CSV goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PriceArgs {
    /// Spot price y0.
    #[arg(long, default_value_t = 100.0)]
    pub spot: f64,
    /// Annualized volatility τ.
    #[arg(long, default_value_t = 0.2)]
    pub vol: f64,
    /// Time to maturity in years.
    #[arg(long, default_value_t = 1.0)]
    pub maturity: f64,
    /// Tail level α.
    #[arg(long, default_value_t = 0.025)]
    pub alpha: f64,
    /// Optional strike for an additional Black–Scholes quote.
    #[arg(long)]
    pub strike: Option<f64>,
    /// Output directory; the JSON report goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn variance_estimator(kind: VarianceArg, lag: usize) -> VarianceEstimator {
    match kind {
        VarianceArg::Iid => VarianceEstimator::iid(),
        VarianceArg::Nw => VarianceEstimator::newey_west(lag),
    }
}

#[derive(Debug, Serialize)]
struct InputRecord {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    command: String,
    version: &'static str,
    config: serde_json::Value,
    inputs: Vec<InputRecord>,
    seed: Option<u64>,
    artifacts: Vec<String>,
}

/// Collects artifacts written to one output directory.
struct OutputDir {
    dir: PathBuf,
    artifacts: Vec<String>,
}

impl OutputDir {
    fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))?;
        Ok(OutputDir { dir: dir.to_path_buf(), artifacts: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    fn finish(self, command: &str, config: &impl Serialize, inputs: Vec<InputRecord>, seed: Option<u64>) -> CliResult<()> {
        let manifest = RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            config: serde_json::to_value(config).map_err(|e| CliError::Usage(e.to_string()))?,
            inputs,
            seed,
            artifacts: self.artifacts,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Usage(e.to_string()))?;
        bytes.push(b'\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, bytes).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }
}

fn read_input(path: &Path) -> CliResult<(Vec<u8>, InputRecord)> {
    let bytes = fs::read(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    Ok((bytes, InputRecord { path: path.display().to_string(), sha256 }))
}

fn data_error(path: &Path, e: esmurphy::Error) -> CliError {
    match CliError::from(e) {
        CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
        other => other,
    }
}

/// A forecast file: `date,var,es,realization`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastFile {
    pub dates: Vec<NaiveDate>,
    pub forecasts: Vec<JointForecast>,
    pub realizations: Vec<f64>,
}

#[derive(Deserialize)]
struct ForecastRow {
    date: String,
    var: f64,
    es: f64,
    realization: f64,
}

pub fn parse_forecast_csv(bytes: &[u8]) -> esmurphy::Result<ForecastFile> {
    use esmurphy::Error;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let mut out = ForecastFile { dates: Vec::new(), forecasts: Vec::new(), realizations: Vec::new() };
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Data { line: e.position().map_or(0, |p| p.line() as usize), message: e.to_string() })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let row: ForecastRow = rec
            .deserialize(Some(&csv::StringRecord::from(vec!["date", "var", "es", "realization"])))
            .map_err(|e| Error::Data { line, message: format!("expected date,var,es,realization: {e}") })?;
        let date = NaiveDate::parse_from_str(&row.date, "%Y-%m-%d")
            .map_err(|e| Error::Data { line, message: format!("bad date {:?}: {e}", row.date) })?;
        if out.dates.last().is_some_and(|d| *d >= date) {
            return Err(Error::Data { line, message: format!("date {date} is not after the previous row") });
        }
        let fc = JointForecast::new(row.var, row.es).map_err(|e| Error::Data { line, message: e.to_string() })?;
        if !row.realization.is_finite() {
            return Err(Error::Data { line, message: "non-finite realization".into() });
        }
        out.dates.push(date);
        out.forecasts.push(fc);
        out.realizations.push(row.realization);
    }
    if out.dates.is_empty() {
        return Err(Error::Data { line: 1, message: "no forecast rows".into() });
    }
    Ok(out)
}

pub fn forecast_csv(dates: &[NaiveDate], forecasts: &[JointForecast], realizations: &[f64]) -> String {
    let mut s = String::from("date,var,es,realization\n");
    for ((d, f), y) in dates.iter().zip(forecasts).zip(realizations) {
        s.push_str(&format!("{},{},{},{}\n", d.format("%Y-%m-%d"), f.var(), f.es(), y));
    }
    s
}

fn load_forecasts(path: &Path) -> CliResult<(ForecastFile, InputRecord)> {
    let (bytes, record) = read_input(path)?;
    let file = parse_forecast_csv(&bytes).map_err(|e| data_error(path, e))?;
    Ok((file, record))
}

/// Pairs two forecast files; dates and realizations must agree row by row.
fn paired_series(a: &ForecastFile, b: &ForecastFile) -> CliResult<EvaluationSeries> {
    let n = a.dates.len().max(b.dates.len());
    for i in 0..n {
        let (da, db) = (a.dates.get(i), b.dates.get(i));
        if da != db {
            let show = |d: Option<&NaiveDate>| d.map_or("<missing>".to_string(), |d| d.to_string());
            return Err(CliError::Data(format!(
                "forecast files are not aligned: first mismatch at row {} ({} vs {})",
                i + 1,
                show(da),
                show(db)
            )));
        }
        if a.realizations[i] != b.realizations[i] {
            return Err(CliError::Data(format!(
                "forecast files disagree on the realization for {}: {} vs {}",
                a.dates[i], a.realizations[i], b.realizations[i]
            )));
        }
    }
    let times = a.dates.iter().map(|d| chrono::Datelike::num_days_from_ce(d) as i64).collect();
    Ok(EvaluationSeries::new(times, a.forecasts.clone(), Some(b.forecasts.clone()), a.realizations.clone())?)
}

fn pretty_json(value: &impl Serialize) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> CliResult<()> {
    let config = RollingConfig { window: args.window, alpha: Level::new(args.alpha)?, nu: args.nu, ..Default::default() };
    if args.models.is_empty() {
        return Err(CliError::Usage("no models requested".into()));
    }
    let (bytes, record) = read_input(&args.input)?;
    let data = MarketData::from_csv(bytes.as_slice()).map_err(|e| data_error(&args.input, e))?;
    let mut results = Vec::new();
    for &m in &args.models {
        let kind = ModelKind::from(m);
        log::info!("running {}", kind.name());
        let fc = rolling_evaluation(&data, kind, &config).map_err(|e| data_error(&args.input, e))?;
        results.push(fc);
    }
    let mut out = OutputDir::create(&args.out)?;
    let mut summary = String::from("model,n,avg_var,avg_es,violation_rate,dropped_rows,fits,nonconverged_fits\n");
    for r in &results {
        let name = r.model.name();
        out.write(&format!("forecasts_{}.csv", name.to_lowercase()), forecast_csv(&r.dates, &r.forecasts, &r.realizations).as_bytes())?;
        let s = r.summary();
        summary.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            name,
            s.n,
            s.avg_var,
            s.avg_es,
            s.violation_rate,
            r.dropped_rows,
            r.fits.len(),
            r.fits.iter().filter(|f| !f.converged).count()
        ));
    }
    out.write("summary.csv", summary.as_bytes())?;
    let fits: Vec<_> = results.iter().map(|r| (r.model.name(), &r.fits)).collect();
    out.write("fits.json", &pretty_json(&fits)?)?;
    #[derive(Serialize)]
    struct Echo<'a> {
        args: &'a EvaluateArgs,
        rolling: &'a RollingConfig,
    }
    out.finish("evaluate", &Echo { args, rolling: &config }, vec![record], None)
}

pub fn cmd_murphy(args: &MurphyArgs) -> CliResult<()> {
    let alpha = Level::new(args.alpha)?;
    let (a, rec_a) = load_forecasts(&args.a)?;
    let (b, rec_b) = load_forecasts(&args.b)?;
    let series = paired_series(&a, &b)?;
    let kind = match args.kind {
        KindArg::V1 => GridKind::V1,
        KindArg::V2 => GridKind::V2,
    };
    let grid = series.grid(args.grid, kind)?;
    let curve_a = murphy_curve(&series, Method::A, &grid, alpha)?;
    let curve_b = murphy_curve(&series, Method::B, &grid, alpha)?;
    let diff = murphy_diff(&series, &grid, alpha, variance_estimator(args.variance, args.lag))?;

    let curves = [LabeledCurve::murphy(&args.label_a, curve_a), LabeledCurve::murphy(&args.label_b, curve_b)];
    let diffs = [LabeledCurve::diff(format!("{} - {}", args.label_a, args.label_b), diff.clone())];
    let mut out = OutputDir::create(&args.out)?;
    out.write("curves.csv", &emit_curve_data(&curves, CurveFormat::Csv)?)?;
    out.write("curves.svg", &emit_curve_data(&curves, CurveFormat::Svg)?)?;
    out.write("diff.csv", &emit_curve_data(&diffs, CurveFormat::Csv)?)?;
    out.write("diff.svg", &emit_curve_data(&diffs, CurveFormat::Svg)?)?;
    #[derive(Serialize)]
    struct DiffSummary<'a> {
        a: &'a str,
        b: &'a str,
        a_dominates_on_grid: bool,
        note: &'static str,
    }
    out.write(
        "diff_summary.json",
        &pretty_json(&DiffSummary {
            a: &args.label_a,
            b: &args.label_b,
            a_dominates_on_grid: diff.a_dominates_on_grid,
            note: "dominance is checked at the grid thresholds only",
        })?,
    )?;
    out.finish("murphy", args, vec![rec_a, rec_b], None)
}

/// Returns the JSON report when no output directory is given.
pub fn cmd_test(args: &TestArgs) -> CliResult<Option<Vec<u8>>> {
    let config = args.options.config()?;
    let (a, rec_a) = load_forecasts(&args.a)?;
    let (b, rec_b) = load_forecasts(&args.b)?;
    let series = paired_series(&a, &b)?;
    let results = dominance_test(&series, &config)?;
    let report = pretty_json(&DominanceReport::new(config.clone(), results))?;
    match &args.out {
        Some(dir) => {
            let mut out = OutputDir::create(dir)?;
            out.write("test.json", &report)?;
            out.finish("test", args, vec![rec_a, rec_b], Some(config.seed))?;
            Ok(None)
        }
        None => Ok(Some(report)),
    }
}

fn read_rk_column(bytes: &[u8], path: &Path) -> CliResult<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let headers = rdr.headers().map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?.clone();
    let col = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case("rk"))
        .ok_or_else(|| CliError::Data(format!("{}: line 1: missing `rk` column", path.display())))?;
    let mut rk = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let line = rec.position().map_or(0, |p| p.line());
        let raw = rec.get(col).unwrap_or("");
        if raw.is_empty() || raw.eq_ignore_ascii_case("na") || raw.eq_ignore_ascii_case("nan") {
            continue;
        }
        let v: f64 = raw
            .parse()
            .map_err(|_| CliError::Data(format!("{}: line {line}: bad rk {raw:?}", path.display())))?;
        if !v.is_finite() || v < 0.0 {
            return Err(CliError::Data(format!("{}: line {line}: rk must be nonnegative, got {v}", path.display())));
        }
        rk.push(v);
    }
    Ok(rk)
}

pub fn study_csv(rows: &[StudyRow]) -> String {
    let mut s = String::from("zeta1,zeta2,T,nominal_level,rejection_rate,se,replications\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.zeta1, r.zeta2, r.horizon, r.nominal_level, r.rejection_rate, r.se, r.replications
        ));
    }
    s
}

/// Returns the study CSV when no output directory is given.
pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<Option<Vec<u8>>> {
    let test = args.options.config()?;
    let (rk_source, inputs) = match &args.rk_file {
        Some(path) => {
            let (bytes, record) = read_input(path)?;
            (RkSource::Observed(read_rk_column(&bytes, path)?), vec![record])
        }
        None => (RkSource::synthetic_default(), Vec::new()),
    };
    if args.zeta1.is_empty() || args.horizon.is_empty() {
        return Err(CliError::Usage("need at least one zeta1 and one horizon".into()));
    }
    let mut rows = Vec::new();
    for &horizon in &args.horizon {
        for &zeta1 in &args.zeta1 {
            let dgp = DgpConfig { rk_source: rk_source.clone(), nu: args.nu, horizon, seed: test.seed, ..Default::default() };
            log::info!("simulating zeta1={zeta1}, zeta2={}, T={horizon}", args.zeta2);
            rows.extend(size_power_study(&dgp, zeta1, args.zeta2, args.replications, &test, &args.levels)?);
        }
    }
    let csv = study_csv(&rows);
    match &args.out {
        Some(dir) => {
            let mut out = OutputDir::create(dir)?;
            out.write("study.csv", csv.as_bytes())?;
            out.finish("simulate", args, inputs, Some(test.seed))?;
            Ok(None)
        }
        None => Ok(Some(csv.into_bytes())),
    }
}

#[derive(Debug, Serialize)]
struct PriceReport {
    spot0: f64,
    annual_vol: f64,
    maturity_years: f64,
    alpha: f64,
    var: f64,
    es: f64,
    p_es: f64,
    p_bs: f64,
    abs_diff: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    strike: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_bs_at_strike: Option<f64>,
}

/// Returns the JSON report when no output directory is given.
pub fn cmd_price(args: &PriceArgs) -> CliResult<Option<Vec<u8>>> {
    let alpha = Level::new(args.alpha)?;
    let scn = OptionScenario::new(args.spot, args.vol, args.maturity, alpha, args.strike.unwrap_or(args.spot))?;
    let check = verify_pricing_equivalence(&scn)?;
    let report = PriceReport {
        spot0: args.spot,
        annual_vol: args.vol,
        maturity_years: args.maturity,
        alpha: args.alpha,
        var: check.var,
        es: check.es,
        p_es: check.p_es,
        p_bs: check.p_bs,
        abs_diff: check.abs_diff,
        strike: args.strike,
        p_bs_at_strike: args.strike.map(|_| black_scholes_put_zero_rate(&scn)),
    };
    let bytes = pretty_json(&report)?;
    match &args.out {
        Some(dir) => {
            let mut out = OutputDir::create(dir)?;
            out.write("price.json", &bytes)?;
            out.finish("price", args, Vec::new(), None)?;
            Ok(None)
        }
        None => Ok(Some(bytes)),
    }
}

/// Runs a parsed command line, writing reports to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let work = || match &cli.command {
        Command::Evaluate(a) => cmd_evaluate(a).map(|_| None),
        Command::Murphy(a) => cmd_murphy(a).map(|_| None),
        Command::Test(a) => cmd_test(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Price(a) => cmd_price(a),
    };
    let report = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?
            .install(work)?,
        None => work()?,
    };
    if let Some(bytes) = report {
        stdout.write_all(&bytes)?;
    }
    Ok(())
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
