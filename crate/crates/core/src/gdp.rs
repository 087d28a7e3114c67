//! Gaussian differential privacy primitives.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::curve::TradeoffCurve;
use crate::error::{param, Error, Result};
use crate::normal;

/// A μ-GDP budget with `0 < μ < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PrivacyBudget(f64);

impl PrivacyBudget {
    pub fn new(mu: f64) -> Result<Self> {
        if mu > 0.0 && mu.is_finite() {
            Ok(Self(mu))
        } else {
            Err(param(
                "mu",
                format!("must be positive and finite, got {mu}"),
            ))
        }
    }

    pub fn mu(self) -> f64 {
        self.0
    }
}

/// An (ε, δ) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpParameters {
    epsilon: f64,
    delta: f64,
}

impl DpParameters {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(param("epsilon", format!("must be >= 0, got {epsilon}")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(param("delta", format!("must lie in [0, 1], got {delta}")));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Gaussian mechanism calibrated to a sensitivity and a GDP budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMechanism {
    sensitivity: f64,
    mu: PrivacyBudget,
}

impl GaussianMechanism {
    pub fn new(sensitivity: f64, mu: PrivacyBudget) -> Result<Self> {
        if !(sensitivity >= 0.0 && sensitivity.is_finite()) {
            return Err(param(
                "sensitivity",
                format!("must be finite and >= 0, got {sensitivity}"),
            ));
        }
        Ok(Self { sensitivity, mu })
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    pub fn budget(&self) -> PrivacyBudget {
        self.mu
    }

    /// Standard deviation Δ/μ of the added noise.
    pub fn noise_sd(&self) -> f64 {
        self.sensitivity / self.mu.mu()
    }
}

/// G_μ. `mu = 0` gives the identity trade-off.
pub fn gaussian_tradeoff(mu: f64) -> Result<TradeoffCurve> {
    if mu == 0.0 {
        return Ok(TradeoffCurve::Identity);
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(param("mu", format!("must be finite and >= 0, got {mu}")));
    }
    Ok(TradeoffCurve::Gaussian { mu })
}

/// Adds i.i.d. N(0, (Δ/μ)²) noise to every coordinate.
pub fn gaussian_mechanism<R: Rng + ?Sized>(
    value: &[f64],
    spec: &GaussianMechanism,
    rng: &mut R,
) -> Vec<f64> {
    let sd = spec.noise_sd();
    value
        .iter()
        .map(|&v| {
            let z: f64 = StandardNormal.sample(rng);
            v + sd * z
        })
        .collect()
}

/// √(μ₁² + … + μ_k²).
pub fn compose_gdp(mus: &[f64]) -> Result<PrivacyBudget> {
    if mus.is_empty() {
        return Err(param("mus", "cannot compose an empty list"));
    }
    if let Some(bad) = mus.iter().find(|&&m| !(m >= 0.0 && m.is_finite())) {
        return Err(param(
            "mus",
            format!("entries must be finite and >= 0, got {bad}"),
        ));
    }
    PrivacyBudget::new(mus.iter().map(|m| m * m).sum::<f64>().sqrt())
}

/// k·μ for groups of size k.
pub fn group_privacy(mu: PrivacyBudget, k: usize) -> Result<PrivacyBudget> {
    if k == 0 {
        return Err(param("k", "group size must be at least 1"));
    }
    PrivacyBudget::new(k as f64 * mu.mu())
}

/// δ(ε) = Φ(−ε/μ + μ/2) − e^ε Φ(−ε/μ − μ/2).
pub fn gdp_to_dp_delta(mu: PrivacyBudget, epsilon: f64) -> f64 {
    let mu = mu.mu();
    let first = normal::cdf(-epsilon / mu + 0.5 * mu);
    let log_second = epsilon + normal::log_cdf(-epsilon / mu - 0.5 * mu);
    let second = if log_second == f64::NEG_INFINITY {
        0.0
    } else {
        log_second.exp()
    };
    (first - second).clamp(0.0, 1.0)
}

/// Unknown to solve for in [`solve_budget`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetTarget {
    /// ε with δ(2ε, μ) = δ: the per-release ε of a (2ε, δ) pair matched to μ-GDP.
    Epsilon { mu: PrivacyBudget, delta: f64 },
    /// μ̃ with δ(ε, μ̃) = δ.
    Mu { epsilon: f64, delta: f64 },
}

/// Bracket for the ε bisection.
pub const EPSILON_BRACKET: (f64, f64) = (0.0, 500.0);
/// Bracket for the μ bisection.
pub const MU_BRACKET: (f64, f64) = (1e-9, 100.0);
/// Absolute tolerance of both bisections.
pub const BUDGET_TOLERANCE: f64 = 1e-9;

/// Solves the (ε, δ) ↔ μ-GDP conversion by bisection.
pub fn solve_budget(target: BudgetTarget) -> Result<f64> {
    match target {
        BudgetTarget::Epsilon { mu, delta } => {
            check_delta(delta)?;
            let residual = |eps: f64| gdp_to_dp_delta(mu, 2.0 * eps) - delta;
            let (lo, hi) = EPSILON_BRACKET;
            if residual(lo) <= 0.0 {
                return Err(Error::Infeasible(format!(
                    "delta = {delta} is at or above delta(0, mu) = {}; epsilon = 0 already suffices",
                    gdp_to_dp_delta(mu, 0.0)
                )));
            }
            if residual(hi) > 0.0 {
                return Err(Error::Infeasible(format!(
                    "delta = {delta} is below delta(2 * {hi}, mu); epsilon exceeds the upper bound {hi}"
                )));
            }
            // residual is decreasing in epsilon
            Ok(bisect(lo, hi, |e| residual(e) > 0.0))
        }
        BudgetTarget::Mu { epsilon, delta } => {
            check_delta(delta)?;
            if !(epsilon >= 0.0 && epsilon.is_finite()) {
                return Err(param("epsilon", format!("must be >= 0, got {epsilon}")));
            }
            let residual = |m: f64| gdp_to_dp_delta(PrivacyBudget(m), epsilon) - delta;
            let (lo, hi) = MU_BRACKET;
            if residual(lo) >= 0.0 {
                return Err(Error::Infeasible(format!(
                    "delta = {delta} is at or below delta(epsilon, {lo}); mu would fall under the lower bound"
                )));
            }
            if residual(hi) < 0.0 {
                return Err(Error::Infeasible(format!(
                    "delta = {delta} exceeds delta(epsilon, {hi}); mu would exceed the upper bound"
                )));
            }
            // residual is increasing in mu
            Ok(bisect(lo, hi, |m| residual(m) < 0.0))
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(param("delta", format!("must lie in (0, 1), got {delta}")))
    }
}

/// Bisection where `go_right(x)` tells whether the root lies above x.
fn bisect(mut lo: f64, mut hi: f64, go_right: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > BUDGET_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if go_right(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
