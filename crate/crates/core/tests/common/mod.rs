//! Property checks shared by the `properties` and `acceptance` targets.
//!
//! Each check panics on the first counterexample.

#![allow(dead_code)]

use std::fs;

use dpboot::blbquant::{
    above_threshold, blbquant_run, partition_bags, BagVotes, BlbConfig, ThresholdNoise,
};
use dpboot::bootstrap::{
    bootstrap_ci, empirical_bootstrap, gdp_m_out_of_n_bootstrap, BootstrapConfig, BootstrapDraws,
    PrivacyMode,
};
use dpboot::curve::{GridCurve, TradeoffCurve};
use dpboot::estimators::{
    bounded_mean_estimator, regularized_logistic_estimator, sample_truncated_normal,
    synthesize_logistic_17d, truncated_normal_variance, Sample,
};
use dpboot::experiments::{
    emit_report, ingest_regression_csv, ingest_regression_pairs, reference_minimizer, ReportFormat,
    ReportRow,
};
use dpboot::gdp::{
    compose_gdp, gaussian_mechanism, gaussian_tradeoff, gdp_to_dp_delta, group_privacy,
    solve_budget, BudgetTarget, GaussianMechanism, PrivacyBudget,
};
use dpboot::rng::stream;
use dpboot::tradeoff::{
    bootstrap_inclusion_probs, bootstrap_privacy_curve, cp_operator, mix_tradeoff, mu_b_star,
    MixtureWeights,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn budget(mu: f64) -> PrivacyBudget {
    PrivacyBudget::new(mu).unwrap()
}

/// Phi via erfc, independent of the crate's normal module.
pub fn phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Non-increasing, convex and below 1 − α, checked on the grid values.
fn assert_tradeoff_shape(grid: &GridCurve) -> Result<(), TestCaseError> {
    let (a, v) = (grid.alpha(), grid.values());
    let tol = 1e-9;
    for i in 0..a.len() {
        prop_assert!(
            v[i] >= -tol && v[i] <= 1.0 - a[i] + tol,
            "f({}) = {} outside [0, 1-α]",
            a[i],
            v[i]
        );
    }
    for i in 1..a.len() {
        prop_assert!(v[i] <= v[i - 1] + tol, "increase at α = {}", a[i]);
    }
    for i in 2..a.len() {
        let s0 = (v[i - 1] - v[i - 2]) / (a[i - 1] - a[i - 2]);
        let s1 = (v[i] - v[i - 1]) / (a[i] - a[i - 1]);
        prop_assert!(
            s1 >= s0 - 1e-6,
            "concave kink at α = {}: {s0} > {s1}",
            a[i - 1]
        );
    }
    Ok(())
}

pub fn curve_invariants() {
    runner(48)
        .run(&(0.05f64..6.0), |mu| {
            assert_tradeoff_shape(&gaussian_tradeoff(mu).unwrap().to_grid())
        })
        .unwrap();
    runner(24)
        .run(
            &(20usize..3000, 1usize..40, 0.2f64..4.0),
            |(n, m, mu_star)| {
                let m = m.min(n);
                assert_tradeoff_shape(&bootstrap_privacy_curve(m, n, mu_star).unwrap().to_grid())
            },
        )
        .unwrap();
    runner(24)
        .run(&(0.1f64..3.0, 0.1f64..3.0, 0.0f64..1.0), |(m1, m2, w)| {
            let weights = MixtureWeights::new(vec![w, 1.0 - w]).unwrap();
            let curves = [
                gaussian_tradeoff(m1).unwrap().to_grid_curve(),
                gaussian_tradeoff(m2).unwrap(),
            ];
            assert_tradeoff_shape(&mix_tradeoff(&weights, &curves).unwrap().to_grid())
        })
        .unwrap();
}

trait ToGridCurve {
    fn to_grid_curve(&self) -> TradeoffCurve;
}

impl ToGridCurve for TradeoffCurve {
    fn to_grid_curve(&self) -> TradeoffCurve {
        TradeoffCurve::Grid(self.to_grid())
    }
}

pub fn composition_identities() {
    runner(64)
        .run(
            &(prop::collection::vec(0.0f64..5.0, 1..12), any::<u64>()),
            |(mus, seed)| {
                let mut shuffled = mus.clone();
                let mut rng = stream(seed, &[]);
                for i in (1..shuffled.len()).rev() {
                    shuffled.swap(i, rng.random_range(0..=i));
                }
                let a = compose_gdp(&mus).unwrap().mu();
                let b = compose_gdp(&shuffled).unwrap().mu();
                prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
                let sq: f64 = mus.iter().map(|m| m * m).sum();
                prop_assert!((a - sq.sqrt()).abs() <= 1e-12 * a.max(1.0));
                Ok(())
            },
        )
        .unwrap();
    runner(64)
        .run(&(0.01f64..3.0, 1usize..50), |(mu, k)| {
            let repeated = compose_gdp(&vec![mu; k]).unwrap().mu();
            prop_assert!((repeated - (k as f64).sqrt() * mu).abs() <= 1e-12 * repeated);
            let group = group_privacy(budget(mu), k).unwrap().mu();
            prop_assert!((group - k as f64 * mu).abs() <= 1e-12 * group);
            Ok(())
        })
        .unwrap();
}

pub fn sigma_identity() {
    runner(128)
        .run(
            &(
                2usize..100_000,
                1usize..200,
                1usize..5000,
                0.05f64..5.0,
                0.1f64..20.0,
            ),
            |(n, m, b, mu, l)| {
                let m = m.min(n);
                let star = mu_b_star(m, n, b, budget(mu));
                let (nf, mf, bf) = (n as f64, m as f64, b as f64);
                let delta_m = l / mf;
                let lhs = delta_m * delta_m / (star * star);
                // 1 − (1 − 1/n)^m without cancellation.
                let p_in = -(mf * (-1.0 / nf).ln_1p()).exp_m1();
                let rhs = bf * p_in * ((nf + mf - 1.0) / nf) * l * l / (mf * nf * mu * mu);
                prop_assert!(
                    (lhs - rhs).abs() <= 1e-12 * rhs,
                    "n={n} m={m} B={b}: {lhs} vs {rhs}"
                );
                Ok(())
            },
        )
        .unwrap();
    // The replicate noise actually used by the bootstrap matches σ_{m,B}.
    let data = Sample::scalar((0..300).map(|i| (i % 7) as f64 - 3.0).collect()).unwrap();
    let est = bounded_mean_estimator(-5.0, 5.0).unwrap();
    let cfg = BootstrapConfig::new(300, 6, 80, PrivacyMode::Gdp(budget(0.7)), 0.05).unwrap();
    let draws = gdp_m_out_of_n_bootstrap(&data, &est, &cfg, &mut stream(1, &[])).unwrap();
    let (nf, mf, bf) = (300.0f64, 6.0f64, 80.0f64);
    let sigma2 =
        bf * (1.0 - (1.0 - 1.0 / nf).powf(mf)) * ((nf + mf - 1.0) / nf) * 100.0 / (mf * nf * 0.49);
    let got = draws.replicate_noise_sd.powi(2);
    assert!((got - sigma2).abs() <= 1e-12 * sigma2, "{got} vs {sigma2}");
}

/// Binomial(m, 1/n) pmf by direct log-space evaluation.
fn binomial_pmf(m: usize, n: usize, i: usize) -> f64 {
    let ln_choose: f64 = (0..i)
        .map(|j| ((m - j) as f64).ln() - ((j + 1) as f64).ln())
        .sum();
    let p = 1.0 / n as f64;
    (ln_choose + i as f64 * p.ln() + (m - i) as f64 * (-p).ln_1p()).exp()
}

pub fn inclusion_normalization() {
    runner(96)
        .run(&(1usize..20_000, 1usize..400), |(n, m)| {
            let probs = bootstrap_inclusion_probs(m, n).unwrap();
            let p = probs.probabilities();
            prop_assert_eq!(p.len(), m + 1);
            let total: f64 = p.iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12, "sum = {total}");
            let mean: f64 = p.iter().enumerate().map(|(i, q)| i as f64 * q).sum();
            let want = m as f64 / n as f64;
            prop_assert!(
                (mean - want).abs() <= 1e-10 * want.max(1e-3),
                "mean {mean} vs {want}"
            );
            for (i, &got) in p.iter().enumerate().take(7) {
                let oracle = binomial_pmf(m, n, i);
                prop_assert!((got - oracle).abs() <= 1e-10 * oracle.max(1e-300) + 1e-300);
            }
            Ok(())
        })
        .unwrap();
}

/// `cp_operator` stays below `min(f_p, f_p⁻¹)`, is convex, and dominates every
/// affine minorant of that minimum.
pub fn cp_minorant() {
    runner(24)
        .run(
            &(0.1f64..4.0, 0.01f64..1.0, -20.0f64..-0.05),
            |(mu, p, slope)| {
                let f = gaussian_tradeoff(mu).unwrap();
                let cp = cp_operator(&f, p).unwrap().to_grid();
                assert_tradeoff_shape(&cp)?;
                let fp = |a: f64| p * f.eval(a) + (1.0 - p) * (1.0 - a);
                let fp_inv = |y: f64| {
                    let (mut lo, mut hi) = (0.0, 1.0);
                    if fp(0.0) <= y {
                        return 0.0;
                    }
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if fp(mid) > y {
                            lo = mid
                        } else {
                            hi = mid
                        }
                    }
                    0.5 * (lo + hi)
                };
                let a = cp.alpha();
                let h: Vec<f64> = a.iter().map(|&x| fp(x).min(fp_inv(x))).collect();
                // Linear interpolation of a convex curve overshoots by O(h²).
                let tol = 1e-5;
                let intercept = a
                    .iter()
                    .zip(&h)
                    .map(|(&x, &y)| y - slope * x)
                    .fold(f64::INFINITY, f64::min);
                for (i, &x) in a.iter().enumerate() {
                    let c = cp.values()[i];
                    prop_assert!(c <= h[i] + tol, "above min at {x}: {c} > {}", h[i]);
                    prop_assert!(
                        c >= intercept + slope * x - tol,
                        "below affine minorant at {x}"
                    );
                }
                Ok(())
            },
        )
        .unwrap();
}

pub fn mix_monotonicity() {
    runner(32)
        .run(
            &(0.1f64..3.0, 0.1f64..3.0, 0.01f64..1.0, 0.0f64..1.0),
            |(a, b, bump, w)| {
                let weights = MixtureWeights::new(vec![w, 1.0 - w]).unwrap();
                let low = mix_tradeoff(
                    &weights,
                    &[gaussian_tradeoff(a).unwrap(), gaussian_tradeoff(b).unwrap()],
                )
                .unwrap();
                let high = mix_tradeoff(
                    &weights,
                    &[
                        gaussian_tradeoff(a + bump).unwrap(),
                        gaussian_tradeoff(b).unwrap(),
                    ],
                )
                .unwrap();
                let (lo_mu, hi_mu) = (a.min(b), a.max(b));
                for i in 0..=200 {
                    let x = i as f64 / 200.0;
                    // A larger budget in one component lowers the mixture.
                    prop_assert!(high.eval(x) <= low.eval(x) + 1e-9);
                    // The mixture lies between its components.
                    let (g_lo, g_hi) = (
                        phi(dpboot::normal::quantile(1.0 - x) - lo_mu),
                        phi(dpboot::normal::quantile(1.0 - x) - hi_mu),
                    );
                    prop_assert!(low.eval(x) <= g_lo + 1e-9 && low.eval(x) >= g_hi - 1e-9);
                }
                Ok(())
            },
        )
        .unwrap();
}

pub fn gaussian_self_inverse() {
    runner(64)
        .run(&(0.05f64..5.0, 0.0f64..1.0), |(mu, a)| {
            let g = gaussian_tradeoff(mu).unwrap();
            let back = g.eval(g.eval(a));
            prop_assert!((back - a).abs() <= 1e-6, "G(G({a})) = {back}");
            Ok(())
        })
        .unwrap();
}

pub fn delta_monotone_and_round_trip() {
    runner(64)
        .run(
            &(0.1f64..3.0, 0.0f64..8.0, 0.01f64..2.0),
            |(mu, e, step)| {
                let d0 = gdp_to_dp_delta(budget(mu), e);
                let d1 = gdp_to_dp_delta(budget(mu), e + step);
                prop_assert!(d1 < d0, "δ not decreasing at μ={mu}, ε={e}");
                if d0 > 1e-14 {
                    let eps = solve_budget(BudgetTarget::Epsilon {
                        mu: budget(mu),
                        delta: d0,
                    })
                    .unwrap();
                    prop_assert!(
                        (2.0 * eps - e).abs() <= 1e-6,
                        "ε round trip: {} vs {e}",
                        2.0 * eps
                    );
                }
                Ok(())
            },
        )
        .unwrap();
    runner(64)
        .run(&(0.1f64..3.0, 0.5f64..6.0), |(mu, e)| {
            let delta = gdp_to_dp_delta(budget(mu), e);
            prop_assume!(delta > 1e-12 && delta < 0.5);
            let back = solve_budget(BudgetTarget::Mu { epsilon: e, delta }).unwrap();
            prop_assert!((back - mu).abs() <= 1e-6, "μ round trip: {back} vs {mu}");
            Ok(())
        })
        .unwrap();
}

/// Reference trace: first t whose `⌊k⌋`-th smallest vote reaches τ.
fn threshold_oracle(votes: &[Vec<f64>], tau: f64, k: f64) -> Option<usize> {
    let s = votes[0].len();
    votes
        .iter()
        .position(|row| {
            let v = if k < 1.0 {
                f64::NEG_INFINITY
            } else if k > s as f64 {
                f64::INFINITY
            } else {
                let mut r = row.clone();
                r.sort_by(f64::total_cmp);
                r[k as usize - 1]
            };
            v >= tau
        })
        .map(|i| i + 1)
}

pub fn above_threshold_traces() {
    let strategy = (
        2usize..12,
        2usize..30,
        0.0f64..1.0,
        -1.0f64..14.0,
        any::<u64>(),
    );
    runner(256)
        .run(&strategy, |(s, t_count, tau, k, seed)| {
            let mut rng = stream(seed, &[]);
            // Monotone per-bag fractions on a coarse lattice so ties occur.
            let mut rows = vec![vec![0.0; s]; t_count];
            for bag in 0..s {
                let mut acc = 0u32;
                for row in rows.iter_mut() {
                    acc = (acc + rng.random_range(0..3)).min(10);
                    row[bag] = acc as f64 / 10.0;
                }
            }
            let votes = BagVotes::new(rows.clone()).unwrap();
            prop_assert!(votes.is_monotone());
            let noise = ThresholdNoise::constant(k, t_count);
            prop_assert_eq!(
                above_threshold(&votes, tau, &noise),
                threshold_oracle(&rows, tau, k)
            );
            // τ = 0: every finite order statistic passes at t = 1.
            let at_zero = above_threshold(&votes, 0.0, &noise);
            prop_assert_eq!(at_zero, if k < 1.0 { None } else { Some(1) });
            Ok(())
        })
        .unwrap();
    // Per-step noise shifts the index at each t.
    let rows = vec![
        vec![0.1, 0.2, 0.3],
        vec![0.2, 0.5, 0.9],
        vec![0.6, 0.7, 0.9],
    ];
    let votes = BagVotes::new(rows).unwrap();
    let noise = ThresholdNoise {
        xi0: 2.5,
        xi: vec![0.0, -1.0, 0.0],
    };
    assert_eq!(above_threshold(&votes, 0.5, &noise), Some(3));
    let noise = ThresholdNoise {
        xi0: 2.5,
        xi: vec![0.0, 0.7, 0.0],
    };
    assert_eq!(above_threshold(&votes, 0.5, &noise), Some(2));
}

pub fn gaussian_mechanism_variance() {
    // Δ = 10√2/n with n = 500, μ = 0.5 gives sd² = 0.0032.
    for (sensitivity, mu, want) in [
        (10.0 * 2f64.sqrt() / 500.0, 0.5, 0.0032),
        (1.0, 1.0, 1.0),
        (0.3, 2.0, 0.0225),
    ] {
        let mech = GaussianMechanism::new(sensitivity, budget(mu)).unwrap();
        assert!((mech.noise_sd().powi(2) - want).abs() <= 1e-12);
        let mut rng = stream(7, &[]);
        let draws = 100_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..draws {
            let v = gaussian_mechanism(&[3.0], &mech, &mut rng)[0] - 3.0;
            sum += v;
            sq += v * v;
        }
        let mean = sum / draws as f64;
        let var = sq / draws as f64 - mean * mean;
        assert!((var / want - 1.0).abs() <= 0.05, "variance {var} vs {want}");
    }
}

pub fn truncated_normal_moments() {
    // Closed form 1 − 2bφ(b)/(2Φ(b) − 1) on [−b, b].
    let b = 5.0f64;
    let dens = (-0.5 * b * b).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let oracle = 1.0 - 2.0 * b * dens / (2.0 * phi(b) - 1.0);
    assert!((truncated_normal_variance(-b, b) - oracle).abs() <= 1e-12);
    let sample = sample_truncated_normal(-b, b, 400_000, &mut stream(3, &[])).unwrap();
    let values: Vec<f64> = (0..sample.len()).map(|i| sample.record(i)[0]).collect();
    assert!(values.iter().all(|v| v.abs() <= b));
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    assert!(
        (var / oracle - 1.0).abs() <= 0.01,
        "variance {var} vs {oracle}"
    );
}

pub fn empirical_bootstrap_spread() {
    let mut rng = stream(11, &[]);
    let values: Vec<f64> = (0..2000).map(|_| StandardNormal.sample(&mut rng)).collect();
    let data = Sample::scalar(values).unwrap();
    let est = bounded_mean_estimator(-10.0, 10.0).unwrap();
    let reps = empirical_bootstrap(&data, &est, 2000, &mut rng).unwrap();
    let v: Vec<f64> = reps.iter().map(|r| r[0]).collect();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt();
    assert!((sd - 1.0).abs() <= 0.06, "bootstrap sd {sd}");
    assert!(mean.abs() <= 0.1, "bootstrap mean {mean}");
}

pub fn bootstrap_ci_normal_oracle() {
    runner(32)
        .run(
            &(100usize..3000, 0.2f64..5.0, 100usize..20_000, -3.0f64..3.0),
            |(b, sigma, n, centre)| {
                // Replicates at the normal quantiles (i − ½)/B.
                let replicates: Vec<Vec<f64>> = (0..b)
                    .rev()
                    .map(|i| vec![sigma * dpboot::normal::quantile((i as f64 + 0.5) / b as f64)])
                    .collect();
                let draws = BootstrapDraws {
                    theta_bar: vec![centre],
                    replicates,
                    mu_star: None,
                    point_noise_sd: 0.0,
                    replicate_noise_sd: 0.0,
                    m: 1,
                };
                let alpha = 0.05;
                let ci = bootstrap_ci(&draws, n, alpha).unwrap();
                let root = (n as f64).sqrt();
                let q = |g: f64| {
                    sigma
                        * dpboot::normal::quantile(
                            (((b as f64 * g) - 1e-9).ceil() - 0.5) / b as f64,
                        )
                };
                prop_assert!((ci.lower[0] - (centre - q(1.0 - alpha) / root)).abs() <= 1e-12);
                prop_assert!((ci.upper[0] - (centre - q(alpha) / root)).abs() <= 1e-12);
                let z = 1.6448536269514722;
                let want = 2.0 * z * sigma / root;
                prop_assert!(
                    (ci.length(0) / want - 1.0).abs() <= 0.03,
                    "length {} vs {want}",
                    ci.length(0)
                );
                prop_assert!(ci.contains(0, centre));
                Ok(())
            },
        )
        .unwrap();
}

pub fn blb_structure() {
    runner(64)
        .run(&(4usize..2000, 1usize..40, any::<u64>()), |(n, s, seed)| {
            prop_assume!(n >= 2 * s);
            let bags = partition_bags(n, s, &mut stream(seed, &[])).unwrap();
            prop_assert_eq!(bags.len(), s);
            let mut seen = vec![false; n];
            for bag in &bags {
                prop_assert_eq!(bag.len(), n / s);
                for &i in bag {
                    prop_assert!(!seen[i], "index {i} in two bags");
                    seen[i] = true;
                }
            }
            Ok(())
        })
        .unwrap();
    let est = bounded_mean_estimator(-5.0, 5.0).unwrap();
    for seed in 0..6u64 {
        let mut rng = stream(seed, &[]);
        let data = sample_truncated_normal(-5.0, 5.0, 400, &mut rng).unwrap();
        let cfg = BlbConfig::new(400, 1.5, 1.0 / 400.0, 0.05, 5.0)
            .unwrap()
            .with_replicates(60);
        let out = blbquant_run(&data, &est, &cfg, &mut rng, None).unwrap();
        assert_eq!(out.votes.len(), 1);
        let votes = &out.votes[0];
        assert!(votes.is_monotone(), "votes not monotone for seed {seed}");
        // With noise pinned to the middle bag the released t is the oracle's.
        let k = votes.bags() as f64 / 2.0;
        let noise = ThresholdNoise::constant(k, votes.t_count());
        let rows: Vec<Vec<f64>> = (1..=votes.t_count())
            .map(|t| votes.at(t).to_vec())
            .collect();
        let tau = 1.0 - cfg.alpha;
        assert_eq!(
            above_threshold(votes, tau, &noise),
            threshold_oracle(&rows, tau, k)
        );
    }
}

pub fn ingest_cases() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pumf.csv");
    fs::write(
        &path,
        "PPSORT,MRKINC,SHELCO\n1,100,10\n2,,20\n3,300,\n4,500,30\n5,200,20\n",
    )
    .unwrap();
    let summary = ingest_regression_pairs(&path).unwrap();
    assert_eq!((summary.kept, summary.dropped), (3, 2));
    let sample = ingest_regression_csv(&path).unwrap();
    assert_eq!((sample.len(), sample.dimension()), (3, 2));
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // MRKINC 100, 500, 200 scale to 0, 1, 0.25; SHELCO 20 scales to exactly 0.5.
    let xs: Vec<f64> = (0..3).map(|i| sample.record(i)[1] / r).collect();
    assert_eq!(xs, vec![0.0, 1.0, 0.25]);
    assert!((0..3).all(|i| sample.record(i)[0] == r));
    assert_eq!(sample.labels().unwrap(), &[-1.0, 1.0, 1.0]);
    fs::write(&path, "mrkinc,shelco\n,\n").unwrap();
    assert!(ingest_regression_pairs(&path).is_err());
}

fn report_rows() -> Vec<ReportRow> {
    (0..3)
        .map(|i| ReportRow {
            scenario: "truncated_normal_mean".into(),
            method: "m_out_of_n".into(),
            n: 1000,
            m: 10,
            b: 100,
            mu: 0.5,
            alpha: 0.05,
            coord: i,
            coverage: 0.894,
            avg_length: 0.136 / (i + 1) as f64,
            avg_time_sec: 0.004,
            replications: 500,
            seed: 0,
        })
        .collect()
}

pub fn report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let rows = report_rows();
    let csv_path = dir.path().join("out.csv");
    emit_report(&rows, &csv_path, ReportFormat::Csv).unwrap();
    let back: Vec<ReportRow> = csv::Reader::from_path(&csv_path)
        .unwrap()
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in rows.iter().zip(&back) {
        assert_eq!(
            (a.n, a.m, a.b, a.coord, a.replications),
            (b.n, b.m, b.b, b.coord, b.replications)
        );
        assert!((a.coverage - b.coverage).abs() <= 1e-3);
        assert!((a.avg_length / b.avg_length - 1.0).abs() <= 5e-3);
    }
    let json_path = dir.path().join("out.json");
    emit_report(&rows, &json_path, ReportFormat::Json).unwrap();
    let back: Vec<ReportRow> =
        serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(back, rows);
    let empty = dir.path().join("empty.csv");
    assert!(emit_report(&[], &empty, ReportFormat::Csv).is_err());
    assert!(!empty.exists());
}

pub fn reference_minimizer_determinism() {
    let data = synthesize_logistic_17d(3000, &mut stream(5, &[])).unwrap();
    let a = reference_minimizer(&data).unwrap();
    let b = reference_minimizer(&data).unwrap();
    assert_eq!(a, b);
    let est = regularized_logistic_estimator(17).unwrap();
    assert_eq!(est.evaluate(&data).unwrap(), est.evaluate(&data).unwrap());
}

/// Every suite with its name.
pub const SUITES: &[(&str, fn())] = &[
    ("curve invariants", curve_invariants),
    ("composition identities", composition_identities),
    ("sigma_{m,B} identity", sigma_identity),
    ("inclusion normalization", inclusion_normalization),
    ("C_p minorant", cp_minorant),
    ("mix monotonicity", mix_monotonicity),
    ("G_mu self-inverse", gaussian_self_inverse),
    (
        "delta monotone / solve round trip",
        delta_monotone_and_round_trip,
    ),
    ("AboveThreshold traces", above_threshold_traces),
    ("Gaussian mechanism variance", gaussian_mechanism_variance),
    ("truncated normal moments", truncated_normal_moments),
    ("empirical bootstrap spread", empirical_bootstrap_spread),
    ("bootstrap_ci normal oracle", bootstrap_ci_normal_oracle),
    ("BLB bags and votes", blb_structure),
    ("ingest cases", ingest_cases),
    ("report round trip", report_round_trip),
    (
        "reference minimizer determinism",
        reference_minimizer_determinism,
    ),
];
