//! BLBQuant: bag of little bootstraps with a sparse-vector quantile release.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};

use crate::bootstrap::{check_alpha, ConfidenceInterval};
use crate::error::{param, Result};
use crate::estimators::{EstimatorSpec, Sample};
use crate::gdp::{solve_budget, BudgetTarget};

/// Default resamples per bag.
pub const DEFAULT_BLB_REPLICATES: usize = 500;

/// How the candidate sets `I_t` and the released interval are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntervalScale {
    /// Hit test `√n |θ̂_m − θ*| ≤ t`, interval `θ̄ ± t̄/√n`.
    #[default]
    Unit,
    /// Hit test `√n |θ̂_m − θ*| ≤ t√n`, interval `θ̄ ± t̄/√n`.
    Verbatim,
}

impl IntervalScale {
    fn step(self, n: usize) -> f64 {
        match self {
            IntervalScale::Unit => 1.0,
            IntervalScale::Verbatim => (n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlbConfig {
    pub n: usize,
    /// Number of bags.
    pub s: usize,
    /// Number of candidate sets T.
    pub t_count: usize,
    /// Resamples per bag.
    pub b: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: f64,
    pub b_sigma: f64,
    pub interval_scale: IntervalScale,
}

impl BlbConfig {
    /// Config with `s` and `T` from [`blb_params`] and the default B.
    pub fn new(n: usize, epsilon: f64, delta: f64, alpha: f64, b_sigma: f64) -> Result<Self> {
        let (s, t_count) = blb_params(n, epsilon, b_sigma)?;
        let cfg = Self {
            n,
            s,
            t_count,
            b: DEFAULT_BLB_REPLICATES,
            epsilon,
            delta,
            alpha,
            b_sigma,
            interval_scale: IntervalScale::Unit,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_replicates(mut self, b: usize) -> Self {
        self.b = b;
        self
    }

    pub fn with_interval_scale(mut self, scale: IntervalScale) -> Self {
        self.interval_scale = scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.s < 2 || self.s > self.n {
            return Err(param("s", format!("need 2 <= s <= n, got s = {}", self.s)));
        }
        if self.n < 2 * self.s {
            return Err(param(
                "s",
                format!(
                    "n = {} is below 2s = {}; bags would hold a single record",
                    self.n,
                    2 * self.s
                ),
            ));
        }
        if self.t_count == 0 {
            return Err(param("T", "must be at least 1"));
        }
        if self.b == 0 {
            return Err(param("B", "must be at least 1"));
        }
        if !(self.epsilon > 0.0) {
            return Err(param("epsilon", "must be positive"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(param("delta", "must lie in (0, 1)"));
        }
        check_alpha(self.alpha)
    }

    /// Level `1 − α` targeted by the construction.
    pub fn level(&self) -> f64 {
        1.0 - self.alpha
    }
}

/// `s = min(max(2, ⌊10 ln n / ε⌋), n)` and `T = ⌈5 b_σ √n⌉`.
pub fn blb_params(n: usize, epsilon: f64, b_sigma: f64) -> Result<(usize, usize)> {
    if n < 2 {
        return Err(param("n", "must be at least 2"));
    }
    if !(epsilon > 0.0) {
        return Err(param("epsilon", "must be positive"));
    }
    if !(b_sigma > 0.0) {
        return Err(param("b_sigma", "must be positive"));
    }
    let nf = n as f64;
    let raw = (10.0 * nf.ln() / epsilon).floor();
    let s = if raw >= nf {
        n
    } else {
        (raw as usize).max(2).min(n)
    };
    let t = (5.0 * b_sigma * nf.sqrt()).ceil() as usize;
    Ok((s, t))
}

/// Per-bag hit fractions `p̂_i(t)`, indexed `[t − 1][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BagVotes {
    votes: Vec<Vec<f64>>,
}

impl BagVotes {
    pub fn new(votes: Vec<Vec<f64>>) -> Result<Self> {
        let s = votes.first().map(Vec::len).unwrap_or(0);
        if s == 0 || votes.iter().any(|v| v.len() != s) {
            return Err(param(
                "votes",
                "every t needs the same positive number of bags",
            ));
        }
        Ok(Self { votes })
    }

    /// Votes from sorted per-bag deviations and thresholds `t·step`.
    fn from_deviations(sorted: &[Vec<f64>], t_count: usize, step: f64) -> Self {
        let votes = (1..=t_count)
            .map(|t| {
                let edge = t as f64 * step;
                sorted
                    .iter()
                    .map(|d| d.partition_point(|&x| x <= edge) as f64 / d.len() as f64)
                    .collect()
            })
            .collect();
        Self { votes }
    }

    pub fn t_count(&self) -> usize {
        self.votes.len()
    }

    pub fn bags(&self) -> usize {
        self.votes[0].len()
    }

    pub fn at(&self, t: usize) -> &[f64] {
        &self.votes[t - 1]
    }

    /// Whether each bag's fraction is non-decreasing in t.
    pub fn is_monotone(&self) -> bool {
        self.votes
            .windows(2)
            .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| a <= b))
    }
}

/// Laplace noise for [`above_threshold`]: `ξ₀` and `ξ_1..ξ_T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdNoise {
    pub xi0: f64,
    pub xi: Vec<f64>,
}

impl ThresholdNoise {
    /// `ξ₀ ~ Lap(s/2, 2/ε)`, `ξ_t ~ Lap(0, 4/ε)`.
    pub fn draw<R: Rng + ?Sized>(s: usize, t_count: usize, epsilon: f64, rng: &mut R) -> Self {
        let xi0 = laplace(s as f64 / 2.0, 2.0 / epsilon, rng);
        let xi = (0..t_count)
            .map(|_| laplace(0.0, 4.0 / epsilon, rng))
            .collect();
        Self { xi0, xi }
    }

    /// The same noisy index `k` at every t.
    pub fn constant(index: f64, t_count: usize) -> Self {
        Self {
            xi0: index,
            xi: vec![0.0; t_count],
        }
    }
}

/// Inverse-CDF draw from Lap(location, scale).
pub fn laplace<R: Rng + ?Sized>(location: f64, scale: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random::<f64>() - 0.5;
    location - scale * u.signum() * (-2.0 * u.abs()).ln_1p()
}

/// First t whose noisy order statistic `y_(⌊ξ₀+ξ_t⌋)(t)` reaches τ, or `None`.
pub fn above_threshold(votes: &BagVotes, tau: f64, noise: &ThresholdNoise) -> Option<usize> {
    let s = votes.bags();
    let mut sorted = Vec::with_capacity(s);
    for t in 1..=votes.t_count() {
        let k = noise.xi0 + noise.xi.get(t - 1).copied().unwrap_or(0.0);
        let v = if k < 1.0 {
            f64::NEG_INFINITY
        } else if k > s as f64 {
            f64::INFINITY
        } else {
            sorted.clear();
            sorted.extend_from_slice(votes.at(t));
            sorted.sort_by(f64::total_cmp);
            sorted[k.floor() as usize - 1]
        };
        if v >= tau {
            return Some(t);
        }
    }
    None
}

/// Random split of `0..n` into `s` disjoint bags of `⌊n/s⌋` indices.
pub fn partition_bags<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R) -> Result<Vec<Vec<usize>>> {
    if s == 0 || n < 2 * s {
        return Err(param(
            "s",
            format!("cannot split n = {n} into {s} bags of size >= 2"),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let size = n / s;
    Ok(order
        .chunks_exact(size)
        .take(s)
        .map(<[usize]>::to_vec)
        .collect())
}

/// Multinomial counts of `draws` uniform picks among `k` cells.
fn multinomial_counts<R: Rng + ?Sized>(draws: usize, k: usize, rng: &mut R, out: &mut Vec<f64>) {
    out.clear();
    let mut left = draws as u64;
    for cell in 0..k {
        let remaining = (k - cell) as f64;
        let c = if cell + 1 == k || left == 0 {
            left
        } else {
            Binomial::new(left, 1.0 / remaining)
                .expect("valid binomial")
                .sample(rng)
        };
        out.push(c as f64);
        left -= c;
    }
}

/// Diagnostics of one BLBQuant run.
#[derive(Debug, Clone, PartialEq)]
pub struct BlbOutcome {
    pub interval: ConfidenceInterval,
    /// The (ε, δ)-DP point estimate θ̄.
    pub theta_bar: Vec<f64>,
    /// Released `t̄` per coordinate.
    pub t_bar: Vec<Option<usize>>,
    /// μ̃ used for the Gaussian mechanism.
    pub mu_tilde: f64,
    pub votes: Vec<BagVotes>,
}

/// The (2ε, δ)-DP BLBQuant interval.
pub fn blbquant_ci<R: Rng + ?Sized>(
    data: &Sample,
    estimator: &EstimatorSpec,
    config: &BlbConfig,
    rng: &mut R,
) -> Result<ConfidenceInterval> {
    Ok(blbquant_run(data, estimator, config, rng, None)?.interval)
}

/// BLBQuant with optional injected threshold noise (one per coordinate when given).
pub fn blbquant_run<R: Rng + ?Sized>(
    data: &Sample,
    estimator: &EstimatorSpec,
    config: &BlbConfig,
    rng: &mut R,
    noise: Option<&ThresholdNoise>,
) -> Result<BlbOutcome> {
    config.validate()?;
    let n = data.len();
    if n != config.n {
        return Err(param(
            "n",
            format!("config has n = {}, data has {n} records", config.n),
        ));
    }
    estimator.check(data)?;
    let mu_tilde = solve_budget(BudgetTarget::Mu {
        epsilon: config.epsilon,
        delta: config.delta,
    })?;
    let sd = estimator.sensitivity(n) / mu_tilde;
    let dim = estimator.dimension();
    let root = (n as f64).sqrt();

    let bags = partition_bags(n, config.s, rng)?;
    // deviations[coord][bag] = sorted √n |θ̂_m − θ*_j|
    let mut deviations = vec![Vec::with_capacity(bags.len()); dim];
    let mut counts = Vec::new();
    for bag in &bags {
        let unit = vec![1.0; bag.len()];
        let theta_m = estimator.evaluate_weighted(data, bag, &unit)?;
        let mut per_coord = vec![Vec::with_capacity(config.b); dim];
        for _ in 0..config.b {
            multinomial_counts(n, bag.len(), rng, &mut counts);
            let (idx, w): (Vec<usize>, Vec<f64>) = bag
                .iter()
                .zip(&counts)
                .filter(|(_, &c)| c > 0.0)
                .map(|(&i, &c)| (i, c))
                .unzip();
            let theta_star = estimator.evaluate_weighted(data, &idx, &w)?;
            for (j, (&a, &b)) in theta_m.iter().zip(&theta_star).enumerate() {
                let z: f64 = StandardNormal.sample(rng);
                per_coord[j].push(root * (a - (b + sd * z)).abs());
            }
        }
        for (j, mut d) in per_coord.into_iter().enumerate() {
            d.sort_by(f64::total_cmp);
            deviations[j].push(d);
        }
    }

    let step = config.interval_scale.step(n);
    let mut theta_bar = estimator.evaluate(data)?;
    for v in &mut theta_bar {
        let z: f64 = StandardNormal.sample(rng);
        *v += sd * z;
    }
    let tau = 1.0 - config.alpha;
    let mut interval = ConfidenceInterval::unbounded(dim, config.level());
    let mut t_bar = Vec::with_capacity(dim);
    let mut all_votes = Vec::with_capacity(dim);
    for j in 0..dim {
        let votes = BagVotes::from_deviations(&deviations[j], config.t_count, step);
        let drawn;
        let noise = match noise {
            Some(n) => n,
            None => {
                drawn = ThresholdNoise::draw(config.s, config.t_count, config.epsilon, rng);
                &drawn
            }
        };
        let t = above_threshold(&votes, tau, noise);
        if let Some(t) = t {
            let half = t as f64 / root;
            interval.lower[j] = theta_bar[j] - half;
            interval.upper[j] = theta_bar[j] + half;
        }
        t_bar.push(t);
        all_votes.push(votes);
    }
    Ok(BlbOutcome {
        interval,
        theta_bar,
        t_bar,
        mu_tilde,
        votes: all_votes,
    })
}
