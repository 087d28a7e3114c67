//! Monte Carlo coverage studies and report emission.

use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blbquant::{blbquant_run, BlbConfig, IntervalScale, DEFAULT_BLB_REPLICATES};
use crate::bootstrap::{
    bootstrap_ci, check_alpha, choose_m, gdp_m_out_of_n_bootstrap, BootstrapConfig,
    ConfidenceInterval, PrivacyMode,
};
use crate::error::{param, Error, Result};
use crate::estimators::{
    bounded_mean_estimator, fit_regularized_logistic, regression_sample_from_pairs,
    regularized_logistic_estimator, sample_truncated_normal, synthesize_census_surrogate,
    synthesize_logistic_17d, EstimatorSpec, Sample, LOGISTIC_MAX_ITERATIONS,
};
use crate::gdp::{solve_budget, BudgetTarget, PrivacyBudget};
use crate::rng::stream;

/// Cap on B under the automatic n-out-of-n rule.
pub const AUTO_B_CAP: usize = 1000;
/// Tolerance of [`reference_minimizer`].
pub const REFERENCE_TOLERANCE: f64 = 1e-10;
/// Default size of the population the regression scenarios resample from.
pub const DEFAULT_POPULATION: usize = 1_000_000;
/// Exact CSV header of a report.
pub const REPORT_HEADER: &str =
    "scenario,method,n,m,B,mu,alpha,coord,coverage,avg_length,avg_time_sec,replications,seed";

macro_rules! named_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $name {
            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.trim().replace('-', "_").as_str() {
                    $($text => Ok($name::$variant),)+
                    other => Err(param(stringify!($name), format!(
                        "unknown value `{other}`, expected one of: {}",
                        [$($text),+].join(", ")
                    ))),
                }
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    TruncatedNormalMean,
    LogisticCensus,
    LogisticSynthetic17d,
}

named_enum!(Scenario {
    TruncatedNormalMean => "truncated_normal_mean",
    LogisticCensus => "logistic_census",
    LogisticSynthetic17d => "logistic_synthetic_17d",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MOutOfN,
    NOutOfN,
    BlbQuant,
}

named_enum!(Method {
    MOutOfN => "m_out_of_n",
    NOutOfN => "n_out_of_n",
    BlbQuant => "blbquant",
});

/// δ used by BLBQuant at sample size n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaRule {
    InverseN,
    InverseNSquared,
}

impl DeltaRule {
    pub fn delta(self, n: usize) -> f64 {
        match self {
            DeltaRule::InverseN => 1.0 / n as f64,
            DeltaRule::InverseNSquared => 1.0 / (n as f64 * n as f64),
        }
    }
}

/// Number of replicates per grid point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplicateRule {
    Fixed(Vec<usize>),
    /// `B = min(round(μ² n), AUTO_B_CAP)` for the bootstrap methods, the
    /// BLBQuant default otherwise.
    Auto,
}

/// Report encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

named_enum!(ReportFormat { Csv => "csv", Json => "json" });

/// A coverage study over the grid `n × μ × B`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub method: Method,
    pub n_grid: Vec<usize>,
    pub b_grid: ReplicateRule,
    /// Total budgets.
    pub mu_grid: Vec<f64>,
    pub alpha: f64,
    pub replications: usize,
    pub seed: u64,
    /// Census CSV; the synthetic surrogate is used when absent.
    pub data_path: Option<PathBuf>,
    /// Overrides `choose_m` for the m-out-of-n method.
    pub m: Option<usize>,
    /// `false` switches off all noise (bootstrap methods only).
    pub private: bool,
    /// Coordinates to report; scenario default when `None`.
    pub coords: Option<Vec<usize>>,
    pub delta_rule: DeltaRule,
    pub interval_scale: IntervalScale,
    /// BLBQuant standard-deviation bound; scenario default when `None`.
    pub b_sigma: Option<f64>,
    /// Population size for the regression scenarios.
    pub population: usize,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario, method: Method) -> Self {
        Self {
            scenario,
            method,
            n_grid: vec![1000],
            b_grid: ReplicateRule::Auto,
            mu_grid: vec![0.5],
            alpha: 0.05,
            replications: 500,
            seed: 0,
            data_path: None,
            m: None,
            private: true,
            coords: None,
            delta_rule: DeltaRule::InverseN,
            interval_scale: IntervalScale::Unit,
            b_sigma: None,
            population: DEFAULT_POPULATION,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(param("replications", "must be at least 1"));
        }
        if self.n_grid.is_empty() || self.mu_grid.is_empty() {
            return Err(param("grid", "n and mu grids must be nonempty"));
        }
        if let ReplicateRule::Fixed(b) = &self.b_grid {
            if b.is_empty() || b.contains(&0) {
                return Err(param("B", "B grid must be nonempty and positive"));
            }
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 2) {
            return Err(param("n", format!("must be at least 2, got {n}")));
        }
        for &mu in &self.mu_grid {
            PrivacyBudget::new(mu)?;
        }
        if self.population == 0 {
            return Err(param("population", "must be at least 1"));
        }
        if !self.private && self.method == Method::BlbQuant {
            return Err(param("private", "BLBQuant has no non-private mode"));
        }
        check_alpha(self.alpha)
    }

    fn default_coords(&self) -> Vec<usize> {
        match self.scenario {
            Scenario::TruncatedNormalMean => vec![0],
            Scenario::LogisticCensus => vec![0, 1],
            Scenario::LogisticSynthetic17d => vec![0, 8, 10],
        }
    }

    fn b_sigma(&self) -> f64 {
        self.b_sigma.unwrap_or(match self.scenario {
            Scenario::TruncatedNormalMean => 5.0,
            _ => 1.0,
        })
    }

    fn b_values(&self, n: usize, mu: f64) -> Vec<usize> {
        match (&self.b_grid, self.method) {
            (ReplicateRule::Fixed(b), _) => b.clone(),
            (ReplicateRule::Auto, Method::BlbQuant) => vec![DEFAULT_BLB_REPLICATES],
            (ReplicateRule::Auto, _) => vec![auto_replicates(n, mu)],
        }
    }
}

/// `min(round(μ² n), AUTO_B_CAP)`, at least 2.
pub fn auto_replicates(n: usize, mu: f64) -> usize {
    ((mu * mu * n as f64).round() as usize).clamp(2, AUTO_B_CAP)
}

/// Everything needed to build one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSpec {
    pub method: Method,
    pub n: usize,
    pub m: usize,
    pub b: usize,
    /// Total budget μ.
    pub mu: f64,
    pub alpha: f64,
    pub private: bool,
    pub delta_rule: DeltaRule,
    pub interval_scale: IntervalScale,
    pub b_sigma: f64,
}

impl IntervalSpec {
    /// Resolves m (`choose_m` for m-out-of-n, n for n-out-of-n).
    pub fn new(method: Method, n: usize, b: usize, mu: f64, alpha: f64) -> Result<Self> {
        let m = match method {
            Method::MOutOfN => choose_m(n, b)?,
            Method::NOutOfN => n,
            Method::BlbQuant => 0,
        };
        let mut spec = Self {
            method,
            n,
            m,
            b,
            mu,
            alpha,
            private: true,
            delta_rule: DeltaRule::InverseN,
            interval_scale: IntervalScale::Unit,
            b_sigma: 5.0,
        };
        if method == Method::BlbQuant {
            let cfg = spec.blb_config()?;
            spec.m = cfg.n / cfg.s;
        }
        Ok(spec)
    }

    /// μ/√2 for each of the two bootstrap stages.
    pub fn stage_budget(&self) -> Result<PrivacyBudget> {
        PrivacyBudget::new(self.mu / 2f64.sqrt())
    }

    /// BLBQuant settings: ε with δ(2ε, μ) = δ.
    pub fn blb_config(&self) -> Result<BlbConfig> {
        let delta = self.delta_rule.delta(self.n);
        let epsilon = solve_budget(BudgetTarget::Epsilon {
            mu: PrivacyBudget::new(self.mu)?,
            delta,
        })?;
        Ok(
            BlbConfig::new(self.n, epsilon, delta, self.alpha, self.b_sigma)?
                .with_replicates(self.b)
                .with_interval_scale(self.interval_scale),
        )
    }

    pub fn build<R: Rng + ?Sized>(
        &self,
        data: &Sample,
        estimator: &EstimatorSpec,
        rng: &mut R,
    ) -> Result<PrivateInterval> {
        match self.method {
            Method::MOutOfN | Method::NOutOfN => {
                let privacy = if self.private {
                    PrivacyMode::Gdp(self.stage_budget()?)
                } else {
                    PrivacyMode::NonPrivate
                };
                let cfg = BootstrapConfig::new(self.n, self.m, self.b, privacy, self.alpha)?;
                let draws = gdp_m_out_of_n_bootstrap(data, estimator, &cfg, rng)?;
                let interval = bootstrap_ci(&draws, self.n, self.alpha)?;
                Ok(PrivateInterval {
                    theta_bar: draws.theta_bar,
                    interval,
                })
            }
            Method::BlbQuant => {
                let out = blbquant_run(data, estimator, &self.blb_config()?, rng, None)?;
                Ok(PrivateInterval {
                    theta_bar: out.theta_bar,
                    interval: out.interval,
                })
            }
        }
    }
}

/// A released point estimate with its interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrivateInterval {
    pub theta_bar: Vec<f64>,
    pub interval: ConfidenceInterval,
}

/// One table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scenario: String,
    pub method: String,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "B")]
    pub b: usize,
    pub mu: f64,
    pub alpha: f64,
    pub coord: usize,
    pub coverage: f64,
    pub avg_length: f64,
    pub avg_time_sec: f64,
    pub replications: usize,
    pub seed: u64,
}

/// Complete `(mrkinc, shelco)` rows read from a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestSummary {
    pub pairs: Vec<(f64, f64)>,
    pub kept: usize,
    pub dropped: usize,
}

/// Reads the `mrkinc,shelco` columns, dropping rows with an empty cell.
pub fn ingest_regression_pairs(path: &Path) -> Result<IngestSummary> {
    let fail = |reason: String| Error::Ingest {
        path: path.to_path_buf(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| fail(e.to_string()))?;
    let headers = reader.headers().map_err(|e| fail(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| fail(format!("missing column `{name}`")))
    };
    let (cx, cy) = (column("mrkinc")?, column("shelco")?);
    let mut pairs = Vec::new();
    let mut dropped = 0;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| fail(e.to_string()))?;
        let (x, y) = (record.get(cx).unwrap_or(""), record.get(cy).unwrap_or(""));
        if x.is_empty() || y.is_empty() {
            dropped += 1;
            continue;
        }
        let parse = |v: &str| {
            v.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| fail(format!("row {}: non-numeric cell `{v}`", row + 2)))
        };
        pairs.push((parse(x)?, parse(y)?));
    }
    if pairs.is_empty() {
        return Err(fail(format!("no complete rows ({dropped} dropped)")));
    }
    Ok(IngestSummary {
        kept: pairs.len(),
        pairs,
        dropped,
    })
}

/// Census-style regression sample: `x = (1/√2, v/√2)`, label `+1` iff response `≥ 0.5`.
pub fn ingest_regression_csv(path: &Path) -> Result<Sample> {
    regression_sample_from_pairs(&ingest_regression_pairs(path)?.pairs)
}

/// Ridge-logistic minimizer over the whole dataset at tolerance 1e-10.
pub fn reference_minimizer(data: &Sample) -> Result<Vec<f64>> {
    fit_regularized_logistic(data, REFERENCE_TOLERANCE, LOGISTIC_MAX_ITERATIONS)
}

struct Population {
    estimator: EstimatorSpec,
    data: Option<Sample>,
    truth: Vec<f64>,
}

impl Population {
    fn build(config: &ExperimentConfig) -> Result<Self> {
        let mut rng = stream(config.seed, &[u64::MAX]);
        match config.scenario {
            Scenario::TruncatedNormalMean => Ok(Self {
                estimator: bounded_mean_estimator(-5.0, 5.0)?,
                data: None,
                truth: vec![0.0],
            }),
            Scenario::LogisticSynthetic17d => {
                let data = synthesize_logistic_17d(config.population, &mut rng)?;
                let truth = reference_minimizer(&data)?;
                Ok(Self {
                    estimator: regularized_logistic_estimator(17)?,
                    data: Some(data),
                    truth,
                })
            }
            Scenario::LogisticCensus => {
                let pairs = match &config.data_path {
                    Some(path) => ingest_regression_pairs(path)?.pairs,
                    None => synthesize_census_surrogate(config.population, &mut rng),
                };
                let data = regression_sample_from_pairs(&pairs)?;
                let truth = reference_minimizer(&data)?;
                Ok(Self {
                    estimator: regularized_logistic_estimator(2)?,
                    data: Some(data),
                    truth,
                })
            }
        }
    }

    fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Sample> {
        match &self.data {
            None => sample_truncated_normal(-5.0, 5.0, n, rng),
            Some(pop) => {
                let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..pop.len())).collect();
                Ok(pop.select(&idx))
            }
        }
    }
}

struct Replication {
    hits: Vec<bool>,
    lengths: Vec<f64>,
    seconds: f64,
}

/// Runs every grid point `R` times and reduces to one row per coordinate.
pub fn run_coverage_study(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    config.validate()?;
    match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| param("threads", e.to_string()))?
            .install(|| study(config)),
        None => study(config),
    }
}

fn study(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let population = Population::build(config)?;
    let coords = config
        .coords
        .clone()
        .unwrap_or_else(|| config.default_coords());
    if let Some(&c) = coords
        .iter()
        .find(|&&c| c >= population.estimator.dimension())
    {
        return Err(param("coords", format!("coordinate {c} out of range")));
    }
    let mut rows = Vec::new();
    let mut grid_index = 0u64;
    for &n in &config.n_grid {
        for &mu in &config.mu_grid {
            for b in config.b_values(n, mu) {
                let mut spec = IntervalSpec::new(config.method, n, b, mu, config.alpha)?;
                spec.private = config.private;
                spec.delta_rule = config.delta_rule;
                spec.interval_scale = config.interval_scale;
                spec.b_sigma = config.b_sigma();
                if let (Some(m), Method::MOutOfN) = (config.m, config.method) {
                    if m == 0 || m > n {
                        return Err(param("m", format!("must lie in [1, {n}], got {m}")));
                    }
                    spec.m = m;
                }
                let reps = (0..config.replications as u64)
                    .into_par_iter()
                    .map(|r| replicate(&population, &spec, &coords, config.seed, grid_index, r))
                    .collect::<Result<Vec<_>>>()?;
                rows.extend(reduce(config, &spec, &coords, &reps));
                grid_index += 1;
            }
        }
    }
    Ok(rows)
}

fn replicate(
    population: &Population,
    spec: &IntervalSpec,
    coords: &[usize],
    seed: u64,
    grid_index: u64,
    r: u64,
) -> Result<Replication> {
    let mut rng = stream(seed, &[grid_index, r]);
    let data = population.draw(spec.n, &mut rng)?;
    let start = Instant::now();
    let ci = spec.build(&data, &population.estimator, &mut rng)?.interval;
    let seconds = start.elapsed().as_secs_f64();
    Ok(Replication {
        hits: coords
            .iter()
            .map(|&c| ci.contains(c, population.truth[c]))
            .collect(),
        lengths: coords.iter().map(|&c| ci.length(c)).collect(),
        seconds,
    })
}

fn reduce(
    config: &ExperimentConfig,
    spec: &IntervalSpec,
    coords: &[usize],
    reps: &[Replication],
) -> Vec<ReportRow> {
    let r = reps.len() as f64;
    let avg_time = reps.iter().map(|x| x.seconds).sum::<f64>() / r;
    coords
        .iter()
        .enumerate()
        .map(|(k, &coord)| ReportRow {
            scenario: config.scenario.name().into(),
            method: config.method.name().into(),
            n: spec.n,
            m: spec.m,
            b: spec.b,
            mu: spec.mu,
            alpha: spec.alpha,
            coord,
            coverage: reps.iter().filter(|x| x.hits[k]).count() as f64 / r,
            avg_length: reps.iter().map(|x| x.lengths[k]).sum::<f64>() / r,
            avg_time_sec: avg_time,
            replications: reps.len(),
            seed: config.seed,
        })
        .collect()
}

/// Three significant figures, scientific below 1e-3.
pub fn format_length(x: f64) -> String {
    if !x.is_finite() || x == 0.0 {
        return x.to_string();
    }
    if x.abs() < 1e-3 {
        return format!("{x:.2e}");
    }
    let digits = (2 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.digits$}")
}

/// Writes rows as CSV or JSON. Empty input is rejected before touching `path`.
pub fn emit_report(rows: &[ReportRow], path: &Path, format: ReportFormat) -> Result<()> {
    if rows.is_empty() {
        return Err(param("rows", "report has no rows"));
    }
    let text = render_report(rows, format)?;
    let mut file = File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}

/// The report as it would be written by [`emit_report`].
pub fn render_report(rows: &[ReportRow], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
        ReportFormat::Csv => {
            let mut out = String::from(REPORT_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{:.3},{},{},{},{}\n",
                    r.scenario,
                    r.method,
                    r.n,
                    r.m,
                    r.b,
                    r.mu,
                    r.alpha,
                    r.coord,
                    r.coverage,
                    format_length(r.avg_length),
                    format_length(r.avg_time_sec),
                    r.replications,
                    r.seed
                ));
            }
            Ok(out)
        }
    }
}
