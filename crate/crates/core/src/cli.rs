//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on runtime errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::blbquant::IntervalScale;
use crate::bootstrap::choose_m;
use crate::curve::TradeoffCurve;
use crate::error::{Error, Result};
use crate::estimators::{
    bounded_mean_estimator, regularized_logistic_estimator, EstimatorSpec, Sample,
};
use crate::experiments::{
    emit_report, ingest_regression_csv, render_report, run_coverage_study, DeltaRule,
    ExperimentConfig, IntervalSpec, Method, ReplicateRule, ReportFormat, Scenario,
};
use crate::gdp::{gdp_to_dp_delta, solve_budget, BudgetTarget, PrivacyBudget};
use crate::rng::stream;
use crate::tradeoff::{bootstrap_privacy_curve, mu_b_star};

#[derive(Debug, Parser)]
#[command(
    name = "dpboot",
    version,
    about = "Private bootstrap confidence intervals under Gaussian DP"
)]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report encoding.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Private confidence interval for a dataset file.
    Ci(CiArgs),
    /// Run a coverage study described by a config file.
    Simulate(SimulateArgs),
    /// Budget conversions, μ*_B and the choice of m.
    Privacy(PrivacyArgs),
    /// Dump a trade-off curve as `alpha,f_alpha` CSV.
    Tradeoff(TradeoffArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct CiArgs {
    /// Dataset: one value per line for `mean`, `mrkinc,shelco` CSV for `logistic`.
    #[arg(long)]
    data: PathBuf,
    /// m-out-of-n, n-out-of-n or blbquant.
    #[arg(long, default_value = "m-out-of-n")]
    method: String,
    /// Expected number of records.
    #[arg(long)]
    n: Option<usize>,
    /// Resample size (m-out-of-n only); defaults to the choose-m rule.
    #[arg(long)]
    m: Option<usize>,
    /// Replicates; defaults to min(μ²n, 1000) for bootstrap methods and 500 for blbquant.
    #[arg(long = "B")]
    b: Option<usize>,
    /// Total GDP budget.
    #[arg(long)]
    mu: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `mean:LOWER,UPPER` or `logistic`.
    #[arg(long, default_value = "mean:-5,5")]
    estimator: String,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: PathBuf,
    /// Report path; printed to stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct PrivacyArgs {
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "B")]
    b: Option<usize>,
}

#[derive(Debug, Args)]
struct TradeoffArgs {
    /// `gaussian:MU` or `bootstrap:M,N,MUSTAR`.
    #[arg(long)]
    curve: String,
}

/// A failure with its exit code.
enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(flag: &str, reason: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("invalid value for {flag}: {reason}"))
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Ci(a) => run_ci(a, out),
        Command::Simulate(a) => run_simulate(a, &cli, out, err),
        Command::Privacy(a) => run_privacy(a, &cli, out),
        Command::Tradeoff(a) => run_tradeoff(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure::Runtime(Error::Io(e))
}

/// Parses `mean:LOWER,UPPER` or `logistic`.
fn parse_estimator(text: &str) -> std::result::Result<(bool, Option<(f64, f64)>), Failure> {
    if text == "logistic" {
        return Ok((true, None));
    }
    let bounds = text
        .strip_prefix("mean:")
        .and_then(|b| b.split_once(','))
        .and_then(|(lo, hi)| Some((lo.trim().parse().ok()?, hi.trim().parse().ok()?)))
        .ok_or_else(|| {
            usage(
                "--estimator",
                format!("`{text}`, expected mean:LOWER,UPPER or logistic"),
            )
        })?;
    Ok((false, Some(bounds)))
}

fn read_scalar_data(path: &Path) -> Result<Sample> {
    let text = fs::read_to_string(path).map_err(|e| Error::Ingest {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cell = line.split(',').next().unwrap_or("").trim();
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) => values.push(v),
            // A non-numeric first line is a header.
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(Error::Ingest {
                    path: path.to_path_buf(),
                    reason: format!("line {}: non-numeric value `{cell}`", i + 1),
                })
            }
        }
    }
    Sample::scalar(values)
}

fn run_ci(a: &CiArgs, out: &mut dyn Write) -> Outcome {
    let method: Method = a.method.parse().map_err(|e| usage("--method", e))?;
    let (logistic, bounds) = parse_estimator(&a.estimator)?;
    PrivacyBudget::new(a.mu).map_err(|e| usage("--mu", e))?;
    let (data, estimator): (Sample, EstimatorSpec) = if logistic {
        (
            ingest_regression_csv(&a.data)?,
            regularized_logistic_estimator(2)?,
        )
    } else {
        let (lo, hi) = bounds.expect("mean bounds");
        (
            read_scalar_data(&a.data)?,
            bounded_mean_estimator(lo, hi).map_err(|e| usage("--estimator", e))?,
        )
    };
    let n = data.len();
    if let Some(expected) = a.n {
        if expected != n {
            return Err(usage(
                "--n",
                format!("{expected}, but the dataset has {n} records"),
            ));
        }
    }
    let b = a.b.unwrap_or(match method {
        Method::BlbQuant => crate::blbquant::DEFAULT_BLB_REPLICATES,
        _ => crate::experiments::auto_replicates(n, a.mu),
    });
    let mut spec = IntervalSpec::new(method, n, b, a.mu, a.alpha).map_err(|e| usage("--B", e))?;
    if let Some(m) = a.m {
        if method != Method::MOutOfN {
            return Err(usage("--m", "only the m-out-of-n method takes m"));
        }
        if m == 0 || m > n {
            return Err(usage("--m", format!("{m} is outside [1, {n}]")));
        }
        spec.m = m;
    }
    if !logistic {
        spec.b_sigma = 5.0;
    } else {
        spec.b_sigma = 1.0;
    }
    let result = spec.build(&data, &estimator, &mut stream(a.seed, &[]))?;
    let body = json!({
        "method": method.name(),
        "n": n,
        "m": spec.m,
        "B": spec.b,
        "mu": a.mu,
        "alpha": a.alpha,
        "seed": a.seed,
        "theta_bar": result.theta_bar,
        "lower": result.interval.lower,
        "upper": result.interval.upper,
        "level": result.interval.level,
    });
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&body).map_err(Error::from)?
    )
    .map_err(io)
}

/// Settings of `simulate` that are not part of the study itself.
#[derive(Debug, Default, PartialEq)]
pub struct RunSettings {
    pub output: Option<PathBuf>,
    pub format: Option<ReportFormat>,
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| config_error(key, format!("cannot parse `{}`", v.trim())))
        })
        .collect()
}

fn config_error(key: &str, reason: impl Into<String>) -> Error {
    Error::Data(format!("config key `{key}`: {}", reason.into()))
}

fn scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| config_error(key, format!("cannot parse `{value}`")))
}

/// Parses a flat `key = value` config with `#` comments.
///
/// `scenario` and `method` are required; unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<(ExperimentConfig, RunSettings)> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Data(format!("config line {}: expected `key = value`", i + 1)))?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    let find = |k: &str| {
        pairs
            .iter()
            .rev()
            .find(|(key, _)| key == k)
            .map(|(_, v)| v.as_str())
    };
    let scenario: Scenario = find("scenario")
        .ok_or_else(|| config_error("scenario", "missing"))?
        .parse()?;
    let method: Method = find("method")
        .ok_or_else(|| config_error("method", "missing"))?
        .parse()?;
    let mut cfg = ExperimentConfig::new(scenario, method);
    let mut settings = RunSettings::default();
    for (key, value) in &pairs {
        let (k, v) = (key.as_str(), value.as_str());
        match k {
            "scenario" | "method" => {}
            "n" => cfg.n_grid = list(k, v)?,
            "B" => {
                cfg.b_grid = if v == "auto" {
                    ReplicateRule::Auto
                } else {
                    ReplicateRule::Fixed(list(k, v)?)
                }
            }
            "mu" => cfg.mu_grid = list(k, v)?,
            "alpha" => cfg.alpha = scalar(k, v)?,
            "replications" => cfg.replications = scalar(k, v)?,
            "seed" => cfg.seed = scalar(k, v)?,
            "data_path" => cfg.data_path = Some(PathBuf::from(v)),
            "m" => cfg.m = Some(scalar(k, v)?),
            "private" => cfg.private = scalar(k, v)?,
            "coords" => cfg.coords = Some(list(k, v)?),
            "delta" => {
                cfg.delta_rule = match v.replace(' ', "").as_str() {
                    "1/n" => DeltaRule::InverseN,
                    "1/n^2" | "1/n2" => DeltaRule::InverseNSquared,
                    _ => return Err(config_error(k, format!("`{v}`, expected 1/n or 1/n^2"))),
                }
            }
            "interval_scale" => {
                cfg.interval_scale = match v {
                    "unit" => IntervalScale::Unit,
                    "verbatim" => IntervalScale::Verbatim,
                    _ => return Err(config_error(k, format!("`{v}`, expected unit or verbatim"))),
                }
            }
            "b_sigma" => cfg.b_sigma = Some(scalar(k, v)?),
            "population" => cfg.population = scalar(k, v)?,
            "threads" => cfg.threads = Some(scalar(k, v)?),
            "output" => settings.output = Some(PathBuf::from(v)),
            "format" => settings.format = Some(v.parse()?),
            _ => return Err(config_error(k, "unknown key")),
        }
    }
    cfg.validate()?;
    Ok((cfg, settings))
}

fn run_simulate(a: &SimulateArgs, cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| usage("--config", format!("{}: {e}", a.config.display())))?;
    let (mut cfg, settings) = parse_config(&text).map_err(|e| usage("--config", e))?;
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    let format = match &cli.format {
        Some(f) => f.parse().map_err(|e| usage("--format", e))?,
        None => settings.format.unwrap_or(ReportFormat::Csv),
    };
    let rows = run_coverage_study(&cfg)?;
    match a.output.clone().or(settings.output) {
        Some(path) => {
            emit_report(&rows, &path, format)?;
            writeln!(err, "wrote {} rows to {}", rows.len(), path.display()).map_err(io)
        }
        None => out
            .write_all(render_report(&rows, format)?.as_bytes())
            .map_err(io),
    }
}

fn run_privacy(a: &PrivacyArgs, cli: &Cli, out: &mut dyn Write) -> Outcome {
    let mut lines: Vec<(&str, serde_json::Value)> = Vec::new();
    let mu =
        a.mu.map(|m| PrivacyBudget::new(m).map_err(|e| usage("--mu", e)))
            .transpose()?;
    if let Some(d) = a.delta {
        if !(d > 0.0 && d < 1.0) {
            return Err(usage("--delta", format!("{d} is outside (0, 1)")));
        }
    }
    if let Some(e) = a.epsilon {
        if !(e >= 0.0) {
            return Err(usage("--epsilon", format!("{e} is negative")));
        }
    }
    match (mu, a.epsilon, a.delta) {
        (Some(mu), None, Some(delta)) => {
            let eps = solve_budget(BudgetTarget::Epsilon { mu, delta })?;
            lines.push(("epsilon", json!(eps)));
            lines.push(("epsilon_total", json!(2.0 * eps)));
        }
        (None, Some(epsilon), Some(delta)) => {
            lines.push((
                "mu",
                json!(solve_budget(BudgetTarget::Mu { epsilon, delta })?),
            ));
        }
        (Some(mu), Some(epsilon), None) => {
            lines.push(("delta", json!(gdp_to_dp_delta(mu, epsilon))));
        }
        (Some(_), Some(_), Some(_)) => {
            return Err(usage(
                "--delta",
                "give at most two of --mu, --epsilon, --delta",
            ));
        }
        _ => {}
    }
    if let (Some(n), Some(b)) = (a.n, a.b) {
        let m = match a.m {
            Some(m) => m,
            None => {
                let m = choose_m(n, b).map_err(|e| usage("--B", e))?;
                lines.push(("m", json!(m)));
                m
            }
        };
        if m == 0 || m > n {
            return Err(usage("--m", format!("{m} is outside [1, {n}]")));
        }
        if let Some(mu) = mu {
            lines.push(("mu_star", json!(mu_b_star(m, n, b, mu))));
        }
    }
    if lines.is_empty() {
        return Err(Failure::Usage(
            "nothing to compute; give two of --mu/--epsilon/--delta, or --n with --B".into(),
        ));
    }
    let text = if cli.format.as_deref() == Some("json") {
        let map: serde_json::Map<String, serde_json::Value> =
            lines.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        serde_json::to_string_pretty(&map).map_err(Error::from)? + "\n"
    } else {
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    };
    out.write_all(text.as_bytes()).map_err(io)
}

fn parse_curve(spec: &str) -> std::result::Result<TradeoffCurve, Failure> {
    let bad = |why: &str| usage("--curve", format!("`{spec}`: {why}"));
    let (kind, args) = spec
        .split_once(':')
        .ok_or_else(|| bad("expected KIND:ARGS"))?;
    match kind {
        "gaussian" => {
            let mu: f64 = args.trim().parse().map_err(|_| bad("MU is not a number"))?;
            crate::gdp::gaussian_tradeoff(mu).map_err(|e| usage("--curve", e))
        }
        "bootstrap" => {
            let parts: Vec<&str> = args.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad("expected bootstrap:M,N,MUSTAR"));
            }
            let m: usize = parts[0].parse().map_err(|_| bad("M is not an integer"))?;
            let n: usize = parts[1].parse().map_err(|_| bad("N is not an integer"))?;
            let mu_star: f64 = parts[2]
                .parse()
                .map_err(|_| bad("MUSTAR is not a number"))?;
            bootstrap_privacy_curve(m, n, mu_star).map_err(|e| usage("--curve", e))
        }
        _ => Err(bad("unknown curve kind")),
    }
}

fn run_tradeoff(a: &TradeoffArgs, out: &mut dyn Write) -> Outcome {
    let curve = parse_curve(&a.curve)?;
    let grid = curve.to_grid();
    let mut text = String::from("alpha,f_alpha\n");
    for (x, y) in grid.alpha().iter().zip(grid.values()) {
        text.push_str(&format!("{x},{y}\n"));
    }
    out.write_all(text.as_bytes()).map_err(io)
}
