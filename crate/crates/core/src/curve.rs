//! Trade-off curves f: [0,1] → [0,1].
//!
//! Analytic kinds (identity, Gaussian, Gaussian mixtures) are evaluated exactly.
//! Everything else lives on a piecewise-linear grid. Binary operations in
//! [`crate::tradeoff`] re-grid onto [`standard_abscissae`].

use crate::error::{Error, Result};
use crate::normal;

/// Number of intervals of the standard grid; the grid has `GRID_INTERVALS + 1` points.
pub const GRID_INTERVALS: usize = 2048;

/// Minimum number of points accepted for a grid curve.
pub const MIN_GRID_POINTS: usize = 1001;

/// Slack used when checking curve invariants.
pub const INVARIANT_TOLERANCE: f64 = 1e-9;

/// Uniform abscissae `i / 2048` for `i = 0..=2048`.
pub fn standard_abscissae() -> Vec<f64> {
    (0..=GRID_INTERVALS)
        .map(|i| i as f64 / GRID_INTERVALS as f64)
        .collect()
}

/// A trade-off function.
#[derive(Debug, Clone, PartialEq)]
pub enum TradeoffCurve {
    /// α ↦ 1 − α (perfect privacy).
    Identity,
    /// G_μ(α) = Φ(Φ⁻¹(1−α) − μ).
    Gaussian { mu: f64 },
    /// Common-subgradient mixture of Gaussian curves.
    GaussianMixture(GaussianMixture),
    /// Piecewise-linear curve through grid points.
    Grid(GridCurve),
}

/// Mixture of `G_{μ_i}` with weights `p_i`.
///
/// Equivalent to the trade-off between the location mixtures
/// `Σ p_i N(−μ_i²/2, μ_i²)` and `Σ p_i N(μ_i²/2, μ_i²)`, which is how it is
/// evaluated: a point on the curve is `(P₀(X > u), P₁(X ≤ u))` and the slope
/// there is `−e^u`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    weights: Vec<f64>,
    mus: Vec<f64>,
}

impl GaussianMixture {
    pub fn new(weights: Vec<f64>, mus: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.len() != mus.len() {
            return Err(Error::Validation(
                "mixture needs equally many weights and components".into(),
            ));
        }
        if mus.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::Validation(
                "mixture components need finite mu > 0".into(),
            ));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::Validation("negative mixture weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { weights, mus })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mus(&self) -> &[f64] {
        &self.mus
    }

    /// `(α, f(α))` at the point where the slope is `−e^u`.
    pub fn point_at_log_slope(&self, u: f64) -> (f64, f64) {
        self.weights
            .iter()
            .zip(&self.mus)
            .fold((0.0, 0.0), |(a, b), (&w, &mu)| {
                let half = 0.5 * mu * mu;
                (
                    a + w * normal::sf((u + half) / mu),
                    b + w * normal::cdf((u - half) / mu),
                )
            })
    }

    fn log_slope_bracket(&self) -> f64 {
        let max_mu = self.mus.iter().cloned().fold(0.0, f64::max);
        0.5 * max_mu * max_mu + 40.0 * max_mu + 1.0
    }

    /// Solves `α(u) = alpha` for the log-slope `u`.
    pub fn log_slope_at(&self, alpha: f64) -> f64 {
        let bracket = self.log_slope_bracket();
        let (mut lo, mut hi) = (-bracket, bracket);
        // α(u) is decreasing in u.
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.point_at_log_slope(mid).0 > alpha {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * (1.0 + mid.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    fn eval(&self, alpha: f64) -> f64 {
        if alpha <= 0.0 {
            return 1.0;
        }
        if alpha >= 1.0 {
            return 0.0;
        }
        let u = self.log_slope_at(alpha);
        self.point_at_log_slope(u).1
    }
}

/// Piecewise-linear curve on a strictly increasing grid spanning [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GridCurve {
    alpha: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl GridCurve {
    pub fn new(alpha: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if alpha.len() != values.len() {
            return Err(Error::Validation(
                "abscissae and ordinates differ in length".into(),
            ));
        }
        if alpha.len() < MIN_GRID_POINTS {
            return Err(Error::Validation(format!(
                "grid has {} points, need at least {MIN_GRID_POINTS}",
                alpha.len()
            )));
        }
        if alpha[0] != 0.0 || *alpha.last().unwrap() != 1.0 {
            return Err(Error::Validation(
                "grid must start at 0 and end at 1".into(),
            ));
        }
        if alpha.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation(
                "abscissae must be strictly increasing".into(),
            ));
        }
        if values
            .iter()
            .any(|&v| !(-INVARIANT_TOLERANCE..=1.0 + INVARIANT_TOLERANCE).contains(&v))
        {
            return Err(Error::Validation("ordinates must lie in [0, 1]".into()));
        }
        let values = values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        Ok(Self::build(alpha, values))
    }

    fn build(alpha: Vec<f64>, values: Vec<f64>) -> Self {
        let slopes = alpha
            .windows(2)
            .zip(values.windows(2))
            .map(|(a, v)| (v[1] - v[0]) / (a[1] - a[0]))
            .collect();
        Self {
            alpha,
            values,
            slopes,
        }
    }

    /// Samples `f` on the standard grid.
    pub fn from_fn(f: impl Fn(f64) -> f64) -> Result<Self> {
        let alpha = standard_abscissae();
        let values = alpha.iter().map(|&a| f(a)).collect();
        Self::new(alpha, values)
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, a: f64) -> f64 {
        if a <= 0.0 {
            return self.values[0];
        }
        if a >= 1.0 {
            return *self.values.last().unwrap();
        }
        let j = self.alpha.partition_point(|&x| x <= a);
        let (x0, x1) = (self.alpha[j - 1], self.alpha[j]);
        let (y0, y1) = (self.values[j - 1], self.values[j]);
        y0 + (y1 - y0) * (a - x0) / (x1 - x0)
    }

    /// Slopes of the linear pieces.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Left-continuous inverse `inf { x : f(x) ≤ y }`.
    pub fn inverse_at(&self, y: f64) -> f64 {
        // Ordinates are non-increasing; find the first index with f_j <= y.
        let j = self.values.partition_point(|&v| v > y);
        if j == 0 {
            return 0.0;
        }
        if j == self.values.len() {
            return 1.0;
        }
        let (x0, x1) = (self.alpha[j - 1], self.alpha[j]);
        let (y0, y1) = (self.values[j - 1], self.values[j]);
        x0 + (x1 - x0) * (y0 - y) / (y0 - y1)
    }

    fn point_at_log_slope(&self, u: f64) -> (f64, f64) {
        let t = -u.exp();
        // Vertex where the slope crosses t: count pieces steeper than t.
        let j = self.slopes.partition_point(|&s| s < t);
        (self.alpha[j], self.values[j])
    }
}

impl TradeoffCurve {
    /// Evaluates f(α), clamping α to [0, 1].
    pub fn eval(&self, alpha: f64) -> f64 {
        let a = alpha.clamp(0.0, 1.0);
        match self {
            TradeoffCurve::Identity => 1.0 - a,
            TradeoffCurve::Gaussian { mu } => gaussian_value(*mu, a),
            TradeoffCurve::GaussianMixture(mix) => mix.eval(a),
            TradeoffCurve::Grid(grid) => grid.eval(a),
        }
    }

    /// The curve sampled on the standard grid.
    pub fn to_grid(&self) -> GridCurve {
        match self {
            TradeoffCurve::Grid(g) if g.alpha.len() == GRID_INTERVALS + 1 => g.clone(),
            _ => {
                let alpha = standard_abscissae();
                let values = alpha.iter().map(|&a| self.eval(a)).collect();
                GridCurve::build(alpha, values)
            }
        }
    }

    /// Whether every component is Gaussian, so the curve is symmetric by construction.
    pub fn is_gaussian_family(&self) -> bool {
        matches!(
            self,
            TradeoffCurve::Gaussian { .. } | TradeoffCurve::GaussianMixture(_)
        )
    }

    /// `(α, f(α))` where the subdifferential contains the slope `−e^u`.
    ///
    /// For piecewise-linear curves the returned vertex is the right end of the
    /// last piece steeper than the slope, so the map is monotone in `u`.
    pub fn point_at_log_slope(&self, u: f64) -> (f64, f64) {
        match self {
            TradeoffCurve::Identity => {
                if u >= 0.0 {
                    (0.0, 1.0)
                } else {
                    (1.0, 0.0)
                }
            }
            TradeoffCurve::Gaussian { mu } => {
                let half = 0.5 * mu * mu;
                (normal::sf((u + half) / mu), normal::cdf((u - half) / mu))
            }
            TradeoffCurve::GaussianMixture(mix) => mix.point_at_log_slope(u),
            TradeoffCurve::Grid(grid) => grid.point_at_log_slope(u),
        }
    }

    /// Functional inverse sampled on the standard grid.
    pub fn inverse(&self) -> TradeoffCurve {
        match self {
            TradeoffCurve::Identity
            | TradeoffCurve::Gaussian { .. }
            | TradeoffCurve::GaussianMixture(_) => self.clone(),
            TradeoffCurve::Grid(grid) => {
                let alpha = standard_abscissae();
                let values = alpha.iter().map(|&y| grid.inverse_at(y)).collect();
                TradeoffCurve::Grid(GridCurve::build(alpha, values))
            }
        }
    }

    /// Checks non-increase, convexity, domination by 1 − α, and f(1) = 0 for
    /// analytic kinds.
    pub fn validate(&self) -> Result<()> {
        let grid = self.to_grid();
        check_grid_invariants(&grid.alpha, &grid.values)?;
        if !matches!(self, TradeoffCurve::Grid(_)) && grid.values.last() != Some(&0.0) {
            return Err(Error::Validation("f(1) must be 0".into()));
        }
        Ok(())
    }
}

/// Invariant check shared by curve validation and tests.
pub fn check_grid_invariants(alpha: &[f64], values: &[f64]) -> Result<()> {
    let tol = INVARIANT_TOLERANCE;
    for (j, (&a, &f)) in alpha.iter().zip(values).enumerate() {
        if f > 1.0 - a + tol {
            return Err(Error::Validation(format!("f({a}) = {f} exceeds 1 - alpha")));
        }
        if j > 0 && f > values[j - 1] + tol {
            return Err(Error::Validation(format!("curve increases at alpha = {a}")));
        }
    }
    for j in 1..alpha.len().saturating_sub(1) {
        let (a0, a1, a2) = (alpha[j - 1], alpha[j], alpha[j + 1]);
        let chord = ((a2 - a1) * values[j - 1] + (a1 - a0) * values[j + 1]) / (a2 - a0);
        if values[j] > chord + tol {
            return Err(Error::Validation(format!(
                "curve is not convex at alpha = {a1}"
            )));
        }
    }
    Ok(())
}

fn gaussian_value(mu: f64, a: f64) -> f64 {
    if a <= 0.0 {
        return 1.0;
    }
    if a >= 1.0 {
        return 0.0;
    }
    if mu == 0.0 {
        return 1.0 - a;
    }
    // Φ(Φ⁻¹(1−α) − μ) written as 1 − Φ(Φ⁻¹(α) + μ) to stay accurate for small α.
    normal::sf(normal::quantile(a) + mu)
}
