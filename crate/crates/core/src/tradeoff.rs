//! Calculus on trade-off curves: inclusion probabilities, μ*_B, mixtures,
//! the C_p operator, the bootstrap privacy curve and the kl/κ functionals.

use crate::curve::{standard_abscissae, GaussianMixture, GridCurve, TradeoffCurve};
use crate::error::{param, Error, Result};
use crate::gdp::PrivacyBudget;
use crate::normal;

/// Tail mass below which the bootstrap mixture is truncated.
pub const MIXTURE_TAIL_MASS: f64 = 1e-12;

/// Binomial(m, 1/n) law of how often one record enters a resample of size m.
#[derive(Debug, Clone, PartialEq)]
pub struct InclusionProbabilities {
    m: usize,
    n: usize,
    p: Vec<f64>,
}

impl InclusionProbabilities {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `p[i]` is the probability of exactly `i` inclusions.
    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    /// Probability that the record is left out, `(1 − 1/n)^m`.
    pub fn p0(&self) -> f64 {
        self.p[0]
    }

    /// Mean inclusion count.
    pub fn mean(&self) -> f64 {
        self.p.iter().enumerate().map(|(i, &p)| i as f64 * p).sum()
    }
}

/// Probability weights of a mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureWeights(Vec<f64>);

impl MixtureWeights {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(param("weights", "need at least one weight"));
        }
        if p.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(param("weights", "weights must be finite and >= 0"));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(param(
                "weights",
                format!("weights sum to {total}, expected 1"),
            ));
        }
        Ok(Self(p))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `p_{m,i} = C(m,i) (1/n)^i (1 − 1/n)^{m−i}` for `i = 0..=m`.
pub fn bootstrap_inclusion_probs(m: usize, n: usize) -> Result<InclusionProbabilities> {
    if m == 0 {
        return Err(param("m", "must be at least 1"));
    }
    if n == 0 {
        return Err(param("n", "must be at least 1"));
    }
    let mut p = vec![0.0; m + 1];
    if n == 1 {
        p[m] = 1.0;
        return Ok(InclusionProbabilities { m, n, p });
    }
    let nf = n as f64;
    let log_q = (-1.0 / nf).ln_1p();
    let log_ratio = -(nf - 1.0).ln();
    // ln p_i via the ratio p_{i+1}/p_i = (m−i)/(i+1) · 1/(n−1).
    let mut log_p = m as f64 * log_q;
    let mut logs = Vec::with_capacity(m + 1);
    logs.push(log_p);
    for i in 0..m {
        log_p += ((m - i) as f64).ln() - ((i + 1) as f64).ln() + log_ratio;
        logs.push(log_p);
    }
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (slot, &l) in p.iter_mut().zip(&logs) {
        *slot = (l - max).exp();
        total += *slot;
    }
    p.iter_mut().for_each(|x| *x /= total);
    Ok(InclusionProbabilities { m, n, p })
}

/// Per-replicate budget μ*_B that makes B replicates μ-GDP in the limit.
pub fn mu_b_star(m: usize, n: usize, b: usize, mu: PrivacyBudget) -> f64 {
    let (mf, nf, bf) = (m as f64, n as f64, b as f64);
    mu.mu() / (bf * inclusion_factor(m, n) * ((nf + mf - 1.0) / nf) * (mf / nf)).sqrt()
}

/// `1 − (1 − 1/n)^m`.
fn inclusion_factor(m: usize, n: usize) -> f64 {
    if n == 1 {
        return 1.0;
    }
    -(m as f64 * (-1.0 / n as f64).ln_1p()).exp_m1()
}

/// Mixture of trade-off curves through common subgradients.
///
/// Gaussian components give an exact [`TradeoffCurve::GaussianMixture`].
/// Anything else is swept over slopes and re-gridded.
pub fn mix_tradeoff(weights: &MixtureWeights, curves: &[TradeoffCurve]) -> Result<TradeoffCurve> {
    let w = weights.as_slice();
    if w.len() != curves.len() {
        return Err(param(
            "curves",
            format!("{} weights for {} curves", w.len(), curves.len()),
        ));
    }
    for c in curves {
        c.validate()?;
    }
    if curves.len() == 1 || curves.windows(2).all(|p| p[0] == p[1]) {
        return Ok(curves[0].clone());
    }
    if curves
        .iter()
        .all(|c| matches!(c, TradeoffCurve::Gaussian { .. }))
    {
        let mus = curves
            .iter()
            .map(|c| match c {
                TradeoffCurve::Gaussian { mu } => *mu,
                _ => unreachable!(),
            })
            .collect();
        return Ok(TradeoffCurve::GaussianMixture(GaussianMixture::new(
            w.to_vec(),
            mus,
        )?));
    }
    Ok(TradeoffCurve::Grid(mix_on_grid(w, curves)))
}

fn mix_on_grid(w: &[f64], curves: &[TradeoffCurve]) -> GridCurve {
    let point = |u: f64| {
        curves.iter().zip(w).fold((0.0, 0.0), |(a, f), (c, &p)| {
            let (ai, fi) = c.point_at_log_slope(u);
            (a + p * ai, f + p * fi)
        })
    };
    let bracket = curves
        .iter()
        .map(|c| match c {
            TradeoffCurve::Gaussian { mu } => 0.5 * mu * mu + 40.0 * mu + 1.0,
            TradeoffCurve::GaussianMixture(m) => {
                let mu = m.mus().iter().cloned().fold(0.0, f64::max);
                0.5 * mu * mu + 40.0 * mu + 1.0
            }
            _ => 0.0,
        })
        .fold(60.0, f64::max);
    let start = (
        0.0,
        curves
            .iter()
            .zip(w)
            .map(|(c, &p)| p * c.eval(0.0))
            .sum::<f64>(),
    );
    let end = (
        1.0,
        curves
            .iter()
            .zip(w)
            .map(|(c, &p)| p * c.eval(1.0))
            .sum::<f64>(),
    );
    let steep = point(bracket);
    let shallow = point(-bracket);

    let alpha = standard_abscissae();
    let values = alpha
        .iter()
        .map(|&a| {
            let (left, right) = if a <= steep.0 {
                (start, steep)
            } else if a >= shallow.0 {
                (shallow, end)
            } else {
                // α(u) is non-increasing; keep lo with α(lo) >= a > α(hi).
                let (mut lo, mut hi) = (-bracket, bracket);
                let (mut p_lo, mut p_hi) = (shallow, steep);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    let p = point(mid);
                    if p.0 >= a {
                        lo = mid;
                        p_lo = p;
                    } else {
                        hi = mid;
                        p_hi = p;
                    }
                    if hi - lo < 1e-12 {
                        break;
                    }
                }
                (p_hi, p_lo)
            };
            interpolate(left, right, a)
        })
        .collect();
    finish_grid(alpha, values)
}

fn interpolate(left: (f64, f64), right: (f64, f64), a: f64) -> f64 {
    let width = right.0 - left.0;
    if width <= 0.0 {
        return left.1.min(right.1);
    }
    left.1 + (right.1 - left.1) * (a - left.0) / width
}

/// Clamps round-off and enforces monotonicity before building a grid.
fn finish_grid(alpha: Vec<f64>, mut values: Vec<f64>) -> GridCurve {
    for j in 0..values.len() {
        let cap = 1.0 - alpha[j];
        let mut v = values[j].clamp(0.0, cap);
        if j > 0 {
            v = v.min(values[j - 1]);
        }
        values[j] = v;
    }
    GridCurve::new(alpha, values).expect("standard grid is valid")
}

/// `C_p(f)`: lower convex envelope of `min{f_p, f_p⁻¹}` with
/// `f_p = p·f + (1 − p)(1 − α)`.
pub fn cp_operator(curve: &TradeoffCurve, p: f64) -> Result<TradeoffCurve> {
    if !(0.0..=1.0).contains(&p) {
        return Err(param("p", format!("must lie in [0, 1], got {p}")));
    }
    curve.validate()?;
    if p == 0.0 {
        return Ok(TradeoffCurve::Identity);
    }
    let alpha = standard_abscissae();
    // The envelope of min{f_p, f_p⁻¹} is the lower hull of both graphs; the graph
    // of f_p⁻¹ is the reflected sample set. Extra abscissae near 0 resolve the
    // steep start of f_p, which becomes the flat end of f_p⁻¹.
    let mut sample = alpha.clone();
    sample.extend((40..=480).map(|k| 10f64.powf(-k as f64 / 40.0)));
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(2 * sample.len());
    for &a in &sample {
        let v = p * curve.eval(a) + (1.0 - p) * (1.0 - a);
        points.push((a, v));
        points.push((v, a));
    }
    points.sort_by(|l, r| l.0.total_cmp(&r.0).then(l.1.total_cmp(&r.1)));
    points.dedup_by(|later, earlier| later.0 == earlier.0);
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
    let hull = lower_hull(&xs, &ys);
    let values = alpha.iter().map(|&a| eval_polyline(&hull, a)).collect();
    Ok(TradeoffCurve::Grid(finish_grid(alpha, values)))
}

/// Lower convex hull (monotone chain) of points sorted by x.
fn lower_hull(x: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(x.len());
    for (&xi, &yi) in x.iter().zip(y) {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // Drop the middle point when it lies on or above the chord.
            let cross = (x2 - x1) * (yi - y1) - (y2 - y1) * (xi - x1);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((xi, yi));
    }
    hull
}

fn eval_polyline(points: &[(f64, f64)], a: f64) -> f64 {
    let j = points.partition_point(|&(x, _)| x <= a);
    if j == 0 {
        return points[0].1;
    }
    if j == points.len() {
        return points[j - 1].1;
    }
    interpolate(points[j - 1], points[j], a)
}

/// The mixture `f_>` of `G_{iμ*}` over `i ≥ 1` with weights `p_{m,i}/(1 − p_{m,0})`,
/// truncated once the remaining tail mass drops below [`MIXTURE_TAIL_MASS`].
pub fn inclusion_mixture(probs: &InclusionProbabilities, mu_star: f64) -> Result<TradeoffCurve> {
    if !(mu_star > 0.0 && mu_star.is_finite()) {
        return Err(param("mu_star", format!("must be positive, got {mu_star}")));
    }
    let p = probs.probabilities();
    let included = 1.0 - probs.p0();
    let mut weights = Vec::new();
    let mut tail = 1.0;
    for &pi in &p[1..] {
        let w = pi / included;
        weights.push(w);
        tail -= w;
        if tail < MIXTURE_TAIL_MASS {
            break;
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mus = (1..=weights.len()).map(|i| i as f64 * mu_star).collect();
    Ok(TradeoffCurve::GaussianMixture(GaussianMixture::new(
        weights, mus,
    )?))
}

/// Privacy curve of one m-out-of-n bootstrap replicate released with budget μ*.
pub fn bootstrap_privacy_curve(m: usize, n: usize, mu_star: f64) -> Result<TradeoffCurve> {
    let probs = bootstrap_inclusion_probs(m, n)?;
    let mixture = inclusion_mixture(&probs, mu_star)?;
    cp_operator(&mixture, 1.0 - probs.p0())
}

/// Integral functionals of `log|f'|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Functionals {
    pub kl: f64,
    pub kappa2: f64,
    pub kappa3: f64,
}

/// kl, κ₂ and κ₃ of a curve.
///
/// Exact for Gaussian kinds. Grid curves integrate `log|slope|` piece by piece;
/// pieces where f is already 0 contribute nothing.
pub fn tradeoff_functionals(curve: &TradeoffCurve) -> Result<Functionals> {
    match curve {
        TradeoffCurve::Identity => Ok(Functionals {
            kl: 0.0,
            kappa2: 0.0,
            kappa3: 0.0,
        }),
        TradeoffCurve::Gaussian { mu } => Ok(gaussian_functionals(*mu)),
        TradeoffCurve::GaussianMixture(mix) => {
            let mut out = Functionals {
                kl: 0.0,
                kappa2: 0.0,
                kappa3: 0.0,
            };
            for (&w, &mu) in mix.weights().iter().zip(mix.mus()) {
                let g = gaussian_functionals(mu);
                out.kl += w * g.kl;
                out.kappa2 += w * g.kappa2;
                out.kappa3 += w * g.kappa3;
            }
            Ok(out)
        }
        TradeoffCurve::Grid(grid) => grid_functionals(grid),
    }
}

fn gaussian_functionals(mu: f64) -> Functionals {
    // log|f'| is distributed as N(−μ²/2, μ²) under α ~ U(0, 1).
    let a = 0.5 * mu;
    let abs_third =
        2.0 * normal::pdf(a) * (a * a + 2.0) + (2.0 * normal::cdf(a) - 1.0) * (a * a * a + 3.0 * a);
    Functionals {
        kl: 0.5 * mu * mu,
        kappa2: mu * mu + 0.25 * mu.powi(4),
        kappa3: mu.powi(3) * abs_third,
    }
}

fn grid_functionals(grid: &GridCurve) -> Result<Functionals> {
    let (alpha, values) = (grid.alpha(), grid.values());
    let mut out = Functionals {
        kl: 0.0,
        kappa2: 0.0,
        kappa3: 0.0,
    };
    let mut covered = 0.0;
    for (j, &s) in grid.slopes().iter().enumerate() {
        let h = alpha[j + 1] - alpha[j];
        if values[j] == 0.0 && values[j + 1] == 0.0 {
            continue;
        }
        if s >= 0.0 {
            return Err(Error::DegenerateCurve(format!(
                "flat piece at alpha = {} where f = {} > 0",
                alpha[j], values[j]
            )));
        }
        let l = (-s).ln();
        out.kl -= h * l;
        out.kappa2 += h * l * l;
        out.kappa3 += h * l.abs().powi(3);
        covered += h;
    }
    if covered == 0.0 {
        return Err(Error::DegenerateCurve("curve is identically zero".into()));
    }
    Ok(out)
}

/// One evaluation of the composition limit at a given B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveBudget {
    pub b: usize,
    pub mu_star: f64,
    /// B · kl of one replicate curve.
    pub kl_total: f64,
    /// B · (κ₂ − kl²) of one replicate curve.
    pub variance_total: f64,
    /// 2K/s, the GDP parameter of the limiting composition.
    pub mu_eff: f64,
}

/// Limit budget of B composed replicate curves `C_{1−p₀}(f_>)` with budget μ*.
///
/// The replicate functionals use the C_p limit factors
/// `kl(C_{1−p₀} f) ≈ (1−p₀)² kl(f)` and `κ₂(C_{1−p₀} f) ≈ (1−p₀)² κ₂(f)`.
pub fn effective_budget(m: usize, n: usize, b: usize, mu_star: f64) -> Result<EffectiveBudget> {
    if b == 0 {
        return Err(param("B", "must be at least 1"));
    }
    let probs = bootstrap_inclusion_probs(m, n)?;
    let f = tradeoff_functionals(&inclusion_mixture(&probs, mu_star)?)?;
    let scale = (1.0 - probs.p0()).powi(2);
    let kl = scale * f.kl;
    let kappa2 = scale * f.kappa2;
    let bf = b as f64;
    let kl_total = bf * kl;
    let variance_total = bf * (kappa2 - kl * kl);
    Ok(EffectiveBudget {
        b,
        mu_star,
        kl_total,
        variance_total,
        mu_eff: 2.0 * kl_total / variance_total.sqrt(),
    })
}

/// μ_eff(B) for each B in `b_grid`, using μ*_B from [`mu_b_star`].
pub fn asymptotic_privacy_check(
    m: usize,
    n: usize,
    mu: PrivacyBudget,
    b_grid: &[usize],
) -> Result<Vec<EffectiveBudget>> {
    if b_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(param("B_grid", "must be strictly increasing"));
    }
    b_grid
        .iter()
        .map(|&b| effective_budget(m, n, b, mu_b_star(m, n, b, mu)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget(mu: f64) -> PrivacyBudget {
        PrivacyBudget::new(mu).unwrap()
    }

    #[test]
    fn inclusion_probs_small_cases() {
        let p = bootstrap_inclusion_probs(1, 10).unwrap();
        assert!((p.probabilities()[0] - 0.9).abs() < 1e-15);
        assert!((p.probabilities()[1] - 0.1).abs() < 1e-15);
        let p = bootstrap_inclusion_probs(2, 2).unwrap();
        for (got, want) in p.probabilities().iter().zip([0.25, 0.5, 0.25]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert_eq!(
            bootstrap_inclusion_probs(3, 1).unwrap().probabilities(),
            &[0.0, 0.0, 0.0, 1.0]
        );
        assert!(bootstrap_inclusion_probs(0, 5).is_err());
        assert!(bootstrap_inclusion_probs(5, 0).is_err());
    }

    #[test]
    fn inclusion_probs_for_large_m_stay_normalized() {
        let p = bootstrap_inclusion_probs(5000, 5000).unwrap();
        let total: f64 = p.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((p.mean() - 1.0).abs() < 1e-12);
        let p0 = (1.0 - 1.0 / 5000.0f64).powi(5000);
        assert!(((p.p0() - p0) / p0).abs() < 1e-12);
    }

    #[test]
    fn mu_b_star_values() {
        assert_eq!(mu_b_star(1, 1, 1, budget(0.7)), 0.7);
        let v = mu_b_star(10, 1000, 100, budget(0.5));
        let direct = 0.5 / (100.0 * (1.0 - 0.999f64.powi(10)) * 1.009 * 0.01).sqrt();
        assert!((v - direct).abs() < 1e-12);
        assert!((v - 4.99).abs() < 0.01 && v > 0.5);
    }

    #[test]
    fn mixture_weights_validation() {
        assert!(MixtureWeights::new(vec![0.5, 0.5]).is_ok());
        assert!(MixtureWeights::new(vec![0.5, 0.6]).is_err());
        assert!(MixtureWeights::new(vec![1.5, -0.5]).is_err());
        assert!(MixtureWeights::new(vec![]).is_err());
    }

    #[test]
    fn mix_of_single_or_identical_curves_is_the_curve() {
        let g = TradeoffCurve::Gaussian { mu: 1.0 };
        let w = MixtureWeights::new(vec![1.0]).unwrap();
        assert_eq!(mix_tradeoff(&w, std::slice::from_ref(&g)).unwrap(), g);
        let w = MixtureWeights::new(vec![0.3, 0.7]).unwrap();
        let mixed = mix_tradeoff(&w, &[g.clone(), g.clone()]).unwrap();
        for i in 0..=100 {
            let a = i as f64 / 100.0;
            assert!((mixed.eval(a) - g.eval(a)).abs() < 1e-6);
        }
    }

    #[test]
    fn grid_mix_matches_exact_gaussian_mixture() {
        let w = MixtureWeights::new(vec![0.5, 0.5]).unwrap();
        let exact = mix_tradeoff(
            &w,
            &[
                TradeoffCurve::Gaussian { mu: 1.0 },
                TradeoffCurve::Gaussian { mu: 2.0 },
            ],
        )
        .unwrap();
        assert!(matches!(exact, TradeoffCurve::GaussianMixture(_)));
        let on_grid = mix_tradeoff(
            &w,
            &[
                TradeoffCurve::Grid(TradeoffCurve::Gaussian { mu: 1.0 }.to_grid()),
                TradeoffCurve::Grid(TradeoffCurve::Gaussian { mu: 2.0 }.to_grid()),
            ],
        )
        .unwrap();
        let worst = standard_abscissae()
            .iter()
            .map(|&a| (exact.eval(a) - on_grid.eval(a)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 2e-3, "worst = {worst}");
        on_grid.validate().unwrap();
    }

    #[test]
    fn mix_rejects_mismatched_or_nonconvex_input() {
        let w = MixtureWeights::new(vec![0.5, 0.5]).unwrap();
        assert!(mix_tradeoff(&w, &[TradeoffCurve::Identity]).is_err());
        let concave = TradeoffCurve::Grid(GridCurve::from_fn(|a| 1.0 - a * a).unwrap());
        assert!(mix_tradeoff(&w, &[concave, TradeoffCurve::Identity]).is_err());
    }

    #[test]
    fn cp_operator_endpoints() {
        let g = TradeoffCurve::Gaussian { mu: 1.0 };
        assert_eq!(cp_operator(&g, 0.0).unwrap(), TradeoffCurve::Identity);
        let full = cp_operator(&g, 1.0).unwrap();
        for i in 0..=200 {
            let a = i as f64 / 200.0;
            assert!((full.eval(a) - g.eval(a)).abs() < 1e-3, "a = {a}");
        }
        assert!(cp_operator(&g, 1.5).is_err());
    }

    #[test]
    fn cp_output_is_a_valid_curve_below_the_pointwise_min() {
        let f = TradeoffCurve::Gaussian { mu: 2.0 };
        let p = 0.3;
        let out = cp_operator(&f, p).unwrap();
        out.validate().unwrap();
        for &a in standard_abscissae().iter().step_by(16) {
            let fp = p * f.eval(a) + (1.0 - p) * (1.0 - a);
            assert!(out.eval(a) <= fp + 1e-9);
        }
    }

    #[test]
    fn bootstrap_curve_dominates_worst_case() {
        let (m, n, mu_star) = (10, 1000, 0.3);
        let curve = bootstrap_privacy_curve(m, n, mu_star).unwrap();
        let worst = TradeoffCurve::Gaussian {
            mu: m as f64 * mu_star,
        };
        for &a in standard_abscissae().iter().step_by(8) {
            assert!(curve.eval(a) >= worst.eval(a) - 1e-9);
        }
    }

    #[test]
    fn functionals_of_simple_curves() {
        let id = tradeoff_functionals(&TradeoffCurve::Identity).unwrap();
        assert_eq!((id.kl, id.kappa2), (0.0, 0.0));
        let id_grid =
            tradeoff_functionals(&TradeoffCurve::Grid(TradeoffCurve::Identity.to_grid())).unwrap();
        assert!(id_grid.kl.abs() < 1e-12 && id_grid.kappa2.abs() < 1e-12);
        let g = tradeoff_functionals(&TradeoffCurve::Gaussian { mu: 0.5 }).unwrap();
        assert!((g.kl - 0.125).abs() < 1e-15);
        assert!(g.kappa2 >= g.kl * g.kl);
    }

    #[test]
    fn grid_functionals_approach_closed_form() {
        let grid = TradeoffCurve::Grid(TradeoffCurve::Gaussian { mu: 0.5 }.to_grid());
        let f = tradeoff_functionals(&grid).unwrap();
        assert!((f.kl - 0.125).abs() < 5e-3, "kl = {}", f.kl);
    }

    #[test]
    fn flat_positive_curve_is_degenerate() {
        let flat = GridCurve::new(standard_abscissae(), vec![0.0; 2049]).unwrap();
        assert!(matches!(
            tradeoff_functionals(&TradeoffCurve::Grid(flat)),
            Err(Error::DegenerateCurve(_))
        ));
    }

    #[test]
    fn effective_budget_cancels_for_single_record() {
        for &b in &[1, 10, 1000] {
            let e = asymptotic_privacy_check(1, 1, budget(0.8), &[b]).unwrap()[0];
            assert!((e.mu_eff - 0.8).abs() < 1e-12, "B = {b}: {}", e.mu_eff);
        }
        assert!(asymptotic_privacy_check(1, 1, budget(0.8), &[10, 5]).is_err());
    }
}
