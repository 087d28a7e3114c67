//! Statistics with known sensitivity laws and the scenario samplers.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{param, Error, Result};

/// Records stored row-major, with optional ±1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    dim: usize,
    labels: Option<Vec<f64>>,
}

impl Sample {
    pub fn new(records: Vec<Vec<f64>>, labels: Option<Vec<f64>>) -> Result<Self> {
        let dim = records.first().map(Vec::len).unwrap_or(0);
        if dim == 0 {
            return Err(Error::Data(
                "sample must contain at least one record".into(),
            ));
        }
        if records.iter().any(|r| r.len() != dim) {
            return Err(Error::Data("records have differing dimensions".into()));
        }
        let values: Vec<f64> = records.into_iter().flatten().collect();
        Self::from_flat(values, dim, labels)
    }

    /// One-dimensional sample.
    pub fn scalar(values: Vec<f64>) -> Result<Self> {
        Self::from_flat(values, 1, None)
    }

    pub fn from_flat(values: Vec<f64>, dim: usize, labels: Option<Vec<f64>>) -> Result<Self> {
        if dim == 0 || values.is_empty() || !values.len().is_multiple_of(dim) {
            return Err(Error::Data(
                "sample must contain at least one full record".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite feature value".into()));
        }
        if let Some(y) = &labels {
            if y.len() != values.len() / dim {
                return Err(Error::Data(format!(
                    "{} labels for {} records",
                    y.len(),
                    values.len() / dim
                )));
            }
            if let Some(bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
                return Err(Error::Data(format!("label {bad} is not in {{-1, +1}}")));
            }
        }
        Ok(Self {
            values,
            dim,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn record(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    /// The records at `indices`, duplicates kept.
    pub fn select(&self, indices: &[usize]) -> Sample {
        let mut values = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            values.extend_from_slice(self.record(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|y| indices.iter().map(|&i| y[i]).collect());
        Sample {
            values,
            dim: self.dim,
            labels,
        }
    }
}

/// The map from data to estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Statistic {
    Mean,
    RegularizedLogistic {
        tolerance: f64,
        max_iterations: usize,
    },
}

/// A statistic with sensitivity `Δ(k) = l/k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSpec {
    dimension: usize,
    sensitivity: f64,
    statistic: Statistic,
    bounds: Option<(f64, f64)>,
}

/// Default gradient-norm tolerance of the logistic solver.
pub const LOGISTIC_TOLERANCE: f64 = 1e-8;
/// Default iteration cap of the logistic solver.
pub const LOGISTIC_MAX_ITERATIONS: usize = 100_000;

/// Mean of scalar data confined to `[lower, upper]`; `l = upper − lower`.
pub fn bounded_mean_estimator(lower: f64, upper: f64) -> Result<EstimatorSpec> {
    if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
        return Err(param(
            "bounds",
            format!("need finite lower < upper, got [{lower}, {upper}]"),
        ));
    }
    Ok(EstimatorSpec {
        dimension: 1,
        sensitivity: upper - lower,
        statistic: Statistic::Mean,
        bounds: Some((lower, upper)),
    })
}

/// Ridge-regularized logistic regression in `dimension` coordinates with `l = 1`.
pub fn regularized_logistic_estimator(dimension: usize) -> Result<EstimatorSpec> {
    if dimension == 0 {
        return Err(param("dimension", "must be at least 1"));
    }
    Ok(EstimatorSpec {
        dimension,
        sensitivity: 1.0,
        statistic: Statistic::RegularizedLogistic {
            tolerance: LOGISTIC_TOLERANCE,
            max_iterations: LOGISTIC_MAX_ITERATIONS,
        },
        bounds: None,
    })
}

impl EstimatorSpec {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// The constant `l`.
    pub fn sensitivity_constant(&self) -> f64 {
        self.sensitivity
    }

    /// `Δ(k) = l/k`.
    pub fn sensitivity(&self, k: usize) -> f64 {
        self.sensitivity / k as f64
    }

    pub fn statistic(&self) -> Statistic {
        self.statistic
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }

    /// Same estimator with a different solver tolerance (logistic only).
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        if let Statistic::RegularizedLogistic { tolerance, .. } = &mut self.statistic {
            *tolerance = tol;
        }
        self
    }

    /// Checks dimension, bounds and labels of `data`.
    pub fn check(&self, data: &Sample) -> Result<()> {
        let expected = match self.statistic {
            Statistic::Mean => 1,
            Statistic::RegularizedLogistic { .. } => self.dimension,
        };
        if data.dimension() != expected {
            return Err(Error::Data(format!(
                "records have dimension {}, estimator expects {expected}",
                data.dimension()
            )));
        }
        if let Some((lo, hi)) = self.bounds {
            if let Some(v) = data.values.iter().find(|&&v| v < lo || v > hi) {
                return Err(Error::Data(format!("value {v} outside [{lo}, {hi}]")));
            }
        }
        if matches!(self.statistic, Statistic::RegularizedLogistic { .. }) && data.labels.is_none()
        {
            return Err(Error::Data("logistic regression needs labels".into()));
        }
        Ok(())
    }

    pub fn evaluate(&self, data: &Sample) -> Result<Vec<f64>> {
        self.check(data)?;
        let all: Vec<usize> = (0..data.len()).collect();
        self.evaluate_weighted(data, &all, &vec![1.0; all.len()])
    }

    /// Evaluates on the records at `indices` (with repetition).
    pub fn evaluate_indices(&self, data: &Sample, indices: &[usize]) -> Result<Vec<f64>> {
        match self.statistic {
            Statistic::Mean => {
                let sum: f64 = indices.iter().map(|&i| data.values[i]).sum();
                Ok(vec![sum / indices.len() as f64])
            }
            Statistic::RegularizedLogistic { .. } => {
                self.evaluate_weighted(data, indices, &vec![1.0; indices.len()])
            }
        }
    }

    /// Evaluates on records `indices[k]` each counted `weights[k]` times.
    pub fn evaluate_weighted(
        &self,
        data: &Sample,
        indices: &[usize],
        weights: &[f64],
    ) -> Result<Vec<f64>> {
        match self.statistic {
            Statistic::Mean => {
                let (mut sum, mut total) = (0.0, 0.0);
                for (&i, &w) in indices.iter().zip(weights) {
                    sum += w * data.values[i];
                    total += w;
                }
                Ok(vec![sum / total])
            }
            Statistic::RegularizedLogistic {
                tolerance,
                max_iterations,
            } => LogisticProblem::new(data, indices, weights).solve(tolerance, max_iterations),
        }
    }
}

/// `(1/W) Σ w_i log(1 + exp(−y_i θᵀx_i)) + ‖θ‖²`.
struct LogisticProblem<'a> {
    data: &'a Sample,
    indices: &'a [usize],
    weights: &'a [f64],
    total: f64,
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl<'a> LogisticProblem<'a> {
    fn new(data: &'a Sample, indices: &'a [usize], weights: &'a [f64]) -> Self {
        Self {
            data,
            indices,
            weights,
            total: weights.iter().sum(),
        }
    }

    fn label(&self, i: usize) -> f64 {
        self.data.labels.as_ref().map_or(1.0, |y| y[i])
    }

    fn objective(&self, theta: &[f64]) -> f64 {
        let loss: f64 = self
            .indices
            .iter()
            .zip(self.weights)
            .map(|(&i, &w)| w * softplus(-self.label(i) * dot(theta, self.data.record(i))))
            .sum();
        loss / self.total + dot(theta, theta)
    }

    fn gradient(&self, theta: &[f64], grad: &mut [f64]) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for (&i, &w) in self.indices.iter().zip(self.weights) {
            let x = self.data.record(i);
            let y = self.label(i);
            let c = -w * y * sigmoid(-y * dot(theta, x)) / self.total;
            for (g, &xj) in grad.iter_mut().zip(x) {
                *g += c * xj;
            }
        }
        for (g, &t) in grad.iter_mut().zip(theta) {
            *g += 2.0 * t;
        }
    }

    fn smoothness(&self) -> f64 {
        let sq: f64 = self
            .indices
            .iter()
            .zip(self.weights)
            .map(|(&i, &w)| {
                let x = self.data.record(i);
                w * dot(x, x)
            })
            .sum();
        2.0 + 0.25 * sq / self.total
    }

    /// Gradient descent from 0 with Armijo backtracking from step 1/L.
    fn solve(&self, tolerance: f64, max_iterations: usize) -> Result<Vec<f64>> {
        let d = self.data.dimension();
        let mut theta = vec![0.0; d];
        let mut grad = vec![0.0; d];
        let mut trial = vec![0.0; d];
        let step0 = 1.0 / self.smoothness();
        let mut value = self.objective(&theta);
        for _ in 0..max_iterations {
            self.gradient(&theta, &mut grad);
            let norm2 = dot(&grad, &grad);
            if norm2.sqrt() <= tolerance {
                return Ok(theta);
            }
            let mut step = step0;
            loop {
                for ((t, &th), &g) in trial.iter_mut().zip(&theta).zip(&grad) {
                    *t = th - step * g;
                }
                let next = self.objective(&trial);
                // Slack for rounding: near the optimum the required decrease drops
                // below the resolution of the objective.
                let slack = 8.0 * f64::EPSILON * value.abs();
                if next <= value - 0.5 * step * norm2 + slack || step < 1e-12 {
                    value = next;
                    break;
                }
                step *= 0.5;
            }
            std::mem::swap(&mut theta, &mut trial);
        }
        self.gradient(&theta, &mut grad);
        let gradient_norm = dot(&grad, &grad).sqrt();
        if gradient_norm <= tolerance {
            return Ok(theta);
        }
        Err(Error::Convergence {
            iterations: max_iterations,
            gradient_norm,
        })
    }
}

/// Minimizer of the ridge-logistic objective over all records.
pub fn fit_regularized_logistic(
    data: &Sample,
    tolerance: f64,
    max_iterations: usize,
) -> Result<Vec<f64>> {
    if !(tolerance > 0.0) {
        return Err(param("tolerance", "must be positive"));
    }
    if data.labels.is_none() {
        return Err(Error::Data("logistic regression needs labels".into()));
    }
    let all: Vec<usize> = (0..data.len()).collect();
    let w = vec![1.0; all.len()];
    LogisticProblem::new(data, &all, &w).solve(tolerance, max_iterations)
}

/// Value of the ridge-logistic objective over all records.
pub fn logistic_objective(data: &Sample, theta: &[f64]) -> f64 {
    let all: Vec<usize> = (0..data.len()).collect();
    let w = vec![1.0; all.len()];
    LogisticProblem::new(data, &all, &w).objective(theta)
}

/// Analytic gradient of [`logistic_objective`].
pub fn logistic_gradient(data: &Sample, theta: &[f64]) -> Vec<f64> {
    let all: Vec<usize> = (0..data.len()).collect();
    let w = vec![1.0; all.len()];
    let mut g = vec![0.0; theta.len()];
    LogisticProblem::new(data, &all, &w).gradient(theta, &mut g);
    g
}

fn truncated_normal_draw<R: Rng + ?Sized>(lower: f64, upper: f64, rng: &mut R) -> f64 {
    loop {
        let z: f64 = StandardNormal.sample(rng);
        if (lower..=upper).contains(&z) {
            return z;
        }
    }
}

/// I.i.d. N(0, 1) draws conditioned on `[lower, upper]`, by rejection.
pub fn sample_truncated_normal<R: Rng + ?Sized>(
    lower: f64,
    upper: f64,
    count: usize,
    rng: &mut R,
) -> Result<Sample> {
    if !(lower < upper) {
        return Err(param(
            "bounds",
            format!("need lower < upper, got [{lower}, {upper}]"),
        ));
    }
    if count == 0 {
        return Err(param("count", "must be at least 1"));
    }
    let values = (0..count)
        .map(|_| truncated_normal_draw(lower, upper, rng))
        .collect();
    Sample::scalar(values)
}

/// Variance of N(0, 1) truncated to `[lower, upper]`.
pub fn truncated_normal_variance(lower: f64, upper: f64) -> f64 {
    use crate::normal::{cdf, pdf};
    let z = cdf(upper) - cdf(lower);
    let mean = (pdf(lower) - pdf(upper)) / z;
    1.0 + (lower * pdf(lower) - upper * pdf(upper)) / z - mean * mean
}

/// Coefficients generating the 17-dimensional synthetic scenario.
pub fn logistic_17d_theta() -> Vec<f64> {
    let mut theta = vec![0.0];
    theta.extend([5.0; 8]);
    theta.extend([-5.0; 8]);
    theta
}

/// `x = (1, x¹, x²)/√17` with x¹ eight N(0,1) truncated to [0,1] and x² eight
/// U(0,1); `P(y = 1) = σ(θᵀx)` for [`logistic_17d_theta`].
pub fn synthesize_logistic_17d<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Result<Sample> {
    if count == 0 {
        return Err(param("count", "must be at least 1"));
    }
    let theta = logistic_17d_theta();
    let scale = 1.0 / 17f64.sqrt();
    let mut values = Vec::with_capacity(count * 17);
    let mut labels = Vec::with_capacity(count);
    let mut x = [0.0; 17];
    for _ in 0..count {
        x[0] = scale;
        for xj in &mut x[1..9] {
            *xj = scale * truncated_normal_draw(0.0, 1.0, rng);
        }
        for xj in &mut x[9..17] {
            *xj = scale * rng.random::<f64>();
        }
        let p = sigmoid(dot(&theta, &x));
        labels.push(if rng.random::<f64>() < p { 1.0 } else { -1.0 });
        values.extend_from_slice(&x);
    }
    Sample::from_flat(values, 17, Some(labels))
}

/// Scales raw `(covariate, response)` pairs to [0,1] by their observed range and
/// builds `x = (1/√2, v/√2)` with label `+1` iff the scaled response is `≥ 0.5`.
pub fn regression_sample_from_pairs(pairs: &[(f64, f64)]) -> Result<Sample> {
    if pairs.is_empty() {
        return Err(Error::Data("no complete rows".into()));
    }
    let range = |sel: fn(&(f64, f64)) -> f64| {
        pairs
            .iter()
            .map(sel)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    };
    let scale = |(lo, hi): (f64, f64), v: f64| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
    let (rx, ry) = (range(|p| p.0), range(|p| p.1));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut values = Vec::with_capacity(2 * pairs.len());
    let mut labels = Vec::with_capacity(pairs.len());
    for &(x, y) in pairs {
        values.push(h);
        values.push(h * scale(rx, x));
        labels.push(if scale(ry, y) >= 0.5 { 1.0 } else { -1.0 });
    }
    Sample::from_flat(values, 2, Some(labels))
}

/// Stand-in for the census file: two positively related variables on [0, 1].
pub fn synthesize_census_surrogate<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<(f64, f64)> {
    (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            let income = u * u;
            let z: f64 = StandardNormal.sample(rng);
            let cost = (0.25 + 0.5 * income + 0.15 * z).clamp(0.0, 1.0);
            (income, cost)
        })
        .collect()
}
