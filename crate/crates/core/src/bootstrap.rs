//! Empirical bootstrap, the μ-GDP m-out-of-n bootstrap and its intervals.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::estimators::{EstimatorSpec, Sample};
use crate::gdp::PrivacyBudget;
use crate::tradeoff::mu_b_star;

/// Whether replicates are privatized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrivacyMode {
    /// μ per stage: once for θ̄_n, once for the replicate set.
    Gdp(PrivacyBudget),
    /// No noise at all (the μ → ∞ limit).
    NonPrivate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    n: usize,
    m: usize,
    b: usize,
    privacy: PrivacyMode,
    alpha: f64,
}

impl BootstrapConfig {
    pub fn new(n: usize, m: usize, b: usize, privacy: PrivacyMode, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(param("n", "must be at least 1"));
        }
        if m == 0 || m > n {
            return Err(param("m", format!("must lie in [1, n = {n}], got {m}")));
        }
        if b == 0 {
            return Err(param("B", "must be at least 1"));
        }
        check_alpha(alpha)?;
        Ok(Self {
            n,
            m,
            b,
            privacy,
            alpha,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn privacy(&self) -> PrivacyMode {
        self.privacy
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(param("alpha", format!("must lie in (0, 0.5), got {alpha}")))
    }
}

/// Output of the private m-out-of-n bootstrap.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapDraws {
    /// θ̄_n.
    pub theta_bar: Vec<f64>,
    /// `√m (θ̄*_{m,b} − θ̄_n)` for `b = 1..=B`.
    pub replicates: Vec<Vec<f64>>,
    /// μ*_B, or `None` without privacy.
    pub mu_star: Option<f64>,
    /// Standard deviation of the noise on θ̄_n, `Δ(n)/μ`.
    pub point_noise_sd: f64,
    /// Standard deviation of the noise on each replicate, `Δ(m)/μ*_B`.
    pub replicate_noise_sd: f64,
    pub m: usize,
}

/// Per-coordinate interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Nominal level.
    pub level: f64,
}

impl ConfidenceInterval {
    /// The interval (−∞, ∞) in every coordinate.
    pub fn unbounded(dim: usize, level: f64) -> Self {
        Self {
            lower: vec![f64::NEG_INFINITY; dim],
            upper: vec![f64::INFINITY; dim],
            level,
        }
    }

    pub fn contains(&self, coord: usize, value: f64) -> bool {
        self.lower[coord] <= value && value <= self.upper[coord]
    }

    pub fn length(&self, coord: usize) -> f64 {
        self.upper[coord] - self.lower[coord]
    }
}

fn add_noise<R: Rng + ?Sized>(value: &mut [f64], sd: f64, rng: &mut R) {
    if sd > 0.0 {
        for v in value {
            let z: f64 = StandardNormal.sample(rng);
            *v += sd * z;
        }
    }
}

fn draw_indices<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R, out: &mut Vec<usize>) {
    out.clear();
    out.extend((0..k).map(|_| rng.random_range(0..n)));
}

/// Non-private bootstrap: `√n (θ(resample) − θ̂_n)` for B resamples of size n.
pub fn empirical_bootstrap<R: Rng + ?Sized>(
    data: &Sample,
    estimator: &EstimatorSpec,
    b: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    if b == 0 {
        return Err(param("B", "must be at least 1"));
    }
    let theta_hat = estimator.evaluate(data)?;
    let n = data.len();
    let root = (n as f64).sqrt();
    let mut idx = Vec::with_capacity(n);
    (0..b)
        .map(|_| {
            draw_indices(n, n, rng, &mut idx);
            let t = estimator.evaluate_indices(data, &idx)?;
            Ok(t.iter()
                .zip(&theta_hat)
                .map(|(a, c)| root * (a - c))
                .collect())
        })
        .collect()
}

/// `m = round(log(1 − 1/B) / log(1 − 1/n))`, clamped to `[1, n]`.
pub fn choose_m(n: usize, b: usize) -> Result<usize> {
    if n < 2 {
        return Err(param("n", format!("must be at least 2, got {n}")));
    }
    if b < 2 {
        return Err(param("B", format!("must be at least 2, got {b}")));
    }
    let ratio = (-1.0 / b as f64).ln_1p() / (-1.0 / n as f64).ln_1p();
    Ok((ratio.round() as usize).clamp(1, n))
}

/// The μ-GDP m-out-of-n bootstrap.
pub fn gdp_m_out_of_n_bootstrap<R: Rng + ?Sized>(
    data: &Sample,
    estimator: &EstimatorSpec,
    config: &BootstrapConfig,
    rng: &mut R,
) -> Result<BootstrapDraws> {
    let n = data.len();
    if n != config.n {
        return Err(param(
            "n",
            format!("config has n = {}, data has {n} records", config.n),
        ));
    }
    let m = config.m;
    let (mu_star, point_noise_sd, replicate_noise_sd) = match config.privacy {
        PrivacyMode::Gdp(mu) => {
            let star = mu_b_star(m, n, config.b, mu);
            (
                Some(star),
                estimator.sensitivity(n) / mu.mu(),
                estimator.sensitivity(m) / star,
            )
        }
        PrivacyMode::NonPrivate => (None, 0.0, 0.0),
    };
    let mut theta_bar = estimator.evaluate(data)?;
    add_noise(&mut theta_bar, point_noise_sd, rng);

    let root = (m as f64).sqrt();
    let mut idx = Vec::with_capacity(m);
    let replicates = (0..config.b)
        .map(|_| {
            draw_indices(n, m, rng, &mut idx);
            let mut t = estimator.evaluate_indices(data, &idx)?;
            add_noise(&mut t, replicate_noise_sd, rng);
            Ok(t.iter()
                .zip(&theta_bar)
                .map(|(a, c)| root * (a - c))
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(BootstrapDraws {
        theta_bar,
        replicates,
        mu_star,
        point_noise_sd,
        replicate_noise_sd,
        m,
    })
}

/// Lower empirical γ-quantile of sorted values: `x_(⌈Bγ⌉)`, 1-based.
pub fn empirical_quantile(sorted: &[f64], gamma: f64) -> f64 {
    let b = sorted.len();
    // The small offset keeps exact products such as 100 · 0.95 from rounding up.
    let k = ((b as f64 * gamma - 1e-9).ceil() as usize).clamp(1, b);
    sorted[k - 1]
}

/// `[θ̄_n − q*_{1−α}/√n, θ̄_n − q*_α/√n]` per coordinate.
pub fn bootstrap_ci(draws: &BootstrapDraws, n: usize, alpha: f64) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    let b = draws.replicates.len();
    if b == 0 {
        return Err(param("draws", "no replicates"));
    }
    if (b as f64) < 1.0 / alpha {
        return Err(Error::TooFewReplicates {
            replicates: b,
            minimum: 1.0 / alpha,
        });
    }
    let root = (n as f64).sqrt();
    let dim = draws.theta_bar.len();
    let mut lower = Vec::with_capacity(dim);
    let mut upper = Vec::with_capacity(dim);
    let mut column = Vec::with_capacity(b);
    for j in 0..dim {
        column.clear();
        column.extend(draws.replicates.iter().map(|r| r[j]));
        column.sort_by(f64::total_cmp);
        let q_lo = empirical_quantile(&column, alpha);
        let q_hi = empirical_quantile(&column, 1.0 - alpha);
        lower.push(draws.theta_bar[j] - q_hi / root);
        upper.push(draws.theta_bar[j] - q_lo / root);
    }
    Ok(ConfidenceInterval {
        lower,
        upper,
        level: 1.0 - 2.0 * alpha,
    })
}
