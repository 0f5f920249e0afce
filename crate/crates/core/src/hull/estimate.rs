//! Monte Carlo estimation of `p_N(θ) = P{θ ∈ cv{X_1, …, X_N}}` and of the
//! smallest `N` with `p_N(θ) ≥ 1/2`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::factorial::ln_binomial;

use super::rng::{derive_seed, stream_rng};
use super::sampler::Sampler;
use super::simplex::membership;
use super::{check_vector, HullError, PointCloud};
use crate::scalar::Scalar;

/// Bernoulli estimate with a Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbabilityEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub successes: u64,
    /// Trials whose membership query came back indeterminate. They are
    /// counted as failures in `estimate`.
    pub indeterminate: u64,
    pub confidence: f64,
    pub seed: u64,
}

/// Wilson score interval for `successes` out of `trials` at two-sided
/// `confidence`.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials > 0, "Wilson interval needs at least one trial");
    assert!(confidence > 0.0 && confidence < 1.0, "confidence must lie in (0, 1)");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = Normal::standard().inverse_cdf(1.0 - (1.0 - confidence) / 2.0);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

/// Exact `p_N(0)` for a centrally symmetric distribution in general position
/// in `ℝ^D`: `1 − 2^{−(N−1)} Σ_{k<D} C(N−1, k)`.
pub fn wendel_probability(n: u64, d: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let m = n - 1;
    let ln2 = std::f64::consts::LN_2;
    let outside: f64 = (0..d.min(m + 1))
        .map(|k| (ln_binomial(m, k) - m as f64 * ln2).exp())
        .sum();
    (1.0 - outside).clamp(0.0, 1.0)
}

enum Trial {
    Inside,
    Outside,
    Indeterminate,
}

/// Estimates `p_N(θ)` from `trials` independent draws of `N` points.
///
/// Trial `i` draws from stream `i` of `seed`; the estimate is identical for any
/// thread count.
pub fn estimate_p<T, S>(
    sampler: &S,
    theta: &[T],
    n: usize,
    trials: u64,
    confidence: f64,
    seed: u64,
) -> Result<ProbabilityEstimate, HullError>
where
    T: Scalar,
    S: Sampler<T> + ?Sized,
{
    let dim = sampler.dim();
    check_vector(theta, dim, "theta")?;
    if n == 0 || trials == 0 {
        return Err(HullError::InvalidArgument("N and trials must be positive".into()));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(HullError::InvalidArgument("confidence must lie in (0, 1)".into()));
    }
    let tol = T::default_tolerance();
    let outcomes: Vec<Result<Trial, HullError>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t);
            let mut data = vec![T::zero(); n * dim];
            for chunk in data.chunks_exact_mut(dim) {
                sampler
                    .sample_into(&mut rng, chunk)
                    .map_err(|source| HullError::Sampler { trial: t, source })?;
            }
            let cloud = PointCloud::from_flat(dim, data)?;
            match membership(&cloud, theta, tol) {
                Ok(c) if c.inside => Ok(Trial::Inside),
                Ok(_) => Ok(Trial::Outside),
                Err(HullError::Indeterminate { .. }) => Ok(Trial::Indeterminate),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut successes = 0u64;
    let mut indeterminate = 0u64;
    for o in outcomes {
        match o? {
            Trial::Inside => successes += 1,
            Trial::Outside => {}
            Trial::Indeterminate => indeterminate += 1,
        }
    }
    let (ci_low, ci_high) = wilson_interval(successes, trials, confidence);
    Ok(ProbabilityEstimate {
        estimate: successes as f64 / trials as f64,
        ci_low,
        ci_high,
        trials,
        successes,
        indeterminate,
        confidence,
        seed,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct NxOptions {
    pub trials: u64,
    pub confidence: f64,
    /// Upper limit on the trial count when the interval straddles 1/2.
    pub max_trials: u64,
    pub n_max: usize,
}

impl NxOptions {
    pub fn new(trials: u64, confidence: f64, n_max: usize) -> Self {
        NxOptions {
            trials,
            confidence,
            max_trials: trials.saturating_mul(16),
            n_max,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum NxEstimate {
    Found {
        n: usize,
        estimate: ProbabilityEstimate,
    },
    Exceeded {
        last: ProbabilityEstimate,
    },
}

impl NxEstimate {
    pub fn value(&self) -> Option<usize> {
        match self {
            NxEstimate::Found { n, .. } => Some(*n),
            NxEstimate::Exceeded { .. } => None,
        }
    }
}

/// Smallest `N` whose estimated `p_N(θ)` is at least 1/2.
///
/// `N` is located by doubling from 1 and then bisecting. At each `N` the Wilson
/// interval decides: `ci_low ≥ 1/2` means at least a half, `ci_high < 1/2`
/// means below. While the interval contains 1/2 the trial count is multiplied
/// by four, up to `max_trials`; an interval that still contains 1/2 at the
/// cap is resolved as "at least a half", since the data cannot reject it.
/// `N` and the escalation round are mixed into the seed of every test.
pub fn estimate_nx<T, S>(
    sampler: &S,
    theta: &[T],
    seed: u64,
    opts: &NxOptions,
) -> Result<NxEstimate, HullError>
where
    T: Scalar,
    S: Sampler<T> + ?Sized,
{
    if opts.n_max == 0 || opts.trials == 0 {
        return Err(HullError::InvalidArgument("N_max and trials must be positive".into()));
    }
    let mut cache: BTreeMap<usize, (bool, ProbabilityEstimate)> = BTreeMap::new();
    let mut decide = |n: usize| -> Result<(bool, ProbabilityEstimate), HullError> {
        if let Some(hit) = cache.get(&n) {
            return Ok(*hit);
        }
        let mut trials = opts.trials;
        let mut round = 0u64;
        let result = loop {
            let s = derive_seed(derive_seed(seed, n as u64), round);
            let est = estimate_p(sampler, theta, n, trials, opts.confidence, s)?;
            if est.ci_low >= 0.5 {
                break (true, est);
            }
            if est.ci_high < 0.5 {
                break (false, est);
            }
            if trials >= opts.max_trials {
                break (true, est);
            }
            trials = trials.saturating_mul(4).min(opts.max_trials);
            round += 1;
        };
        cache.insert(n, result);
        Ok(result)
    };

    let mut lo = 0usize;
    let mut hi: Option<(usize, ProbabilityEstimate)> = None;
    let mut n = 1usize;
    let last = loop {
        let (ok, est) = decide(n)?;
        if ok {
            hi = Some((n, est));
            break est;
        }
        lo = n;
        if n >= opts.n_max {
            break est;
        }
        n = (n * 2).min(opts.n_max);
    };
    let Some((mut hi_n, mut hi_est)) = hi else {
        return Ok(NxEstimate::Exceeded { last });
    };
    while hi_n - lo > 1 {
        let mid = lo + (hi_n - lo) / 2;
        let (ok, est) = decide(mid)?;
        if ok {
            hi_n = mid;
            hi_est = est;
        } else {
            lo = mid;
        }
    }
    Ok(NxEstimate::Found {
        n: hi_n,
        estimate: hi_est,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::{ConstantSampler, GaussianSampler, UniformBoxSampler};

    #[test]
    fn wilson_contains_estimate() {
        for (s, n) in [(0, 10), (10, 10), (3, 7), (5000, 10000)] {
            let (lo, hi) = wilson_interval(s, n, 0.99);
            let p = s as f64 / n as f64;
            assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0);
        }
        let (lo, hi) = wilson_interval(50, 100, 0.95);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn wendel_values() {
        assert_eq!(wendel_probability(1, 1), 0.0);
        assert!((wendel_probability(2, 1) - 0.5).abs() < 1e-15);
        assert!((wendel_probability(3, 2) - 0.25).abs() < 1e-15);
        assert!((wendel_probability(4, 2) - 0.5).abs() < 1e-15);
        assert!((wendel_probability(6, 5) - 1.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_line_two_points() {
        let est = estimate_p(&GaussianSampler { dim: 1 }, &[0.0], 2, 4000, 0.99, 11).unwrap();
        assert!(est.ci_low <= 0.5 && 0.5 <= est.ci_high, "{est:?}");
        assert_eq!(est.indeterminate, 0);
    }

    #[test]
    fn target_outside_support_never_hits() {
        let s = UniformBoxSampler { dim: 1, lo: 0.0, hi: 1.0 };
        let est = estimate_p(&s, &[2.0], 20, 500, 0.95, 3).unwrap();
        assert_eq!(est.successes, 0);
        assert_eq!(est.estimate, 0.0);
    }

    #[test]
    fn deterministic_given_seed() {
        let s = GaussianSampler { dim: 2 };
        let a = estimate_p(&s, &[0.0, 0.0], 4, 300, 0.9, 5).unwrap();
        let b = estimate_p(&s, &[0.0, 0.0], 4, 300, 0.9, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nx_examples() {
        let g1 = GaussianSampler { dim: 1 };
        let r = estimate_nx(&g1, &[0.0], 1, &NxOptions::new(2000, 0.99, 64)).unwrap();
        assert_eq!(r.value(), Some(2));
        let g2 = GaussianSampler { dim: 2 };
        let r = estimate_nx(&g2, &[0.0, 0.0], 2, &NxOptions::new(2000, 0.99, 64)).unwrap();
        assert_eq!(r.value(), Some(4));
        let c = ConstantSampler { value: vec![0.3, -1.0] };
        let r = estimate_nx(&c, &[0.3, -1.0], 3, &NxOptions::new(50, 0.99, 64)).unwrap();
        assert_eq!(r.value(), Some(1));
    }

    #[test]
    fn nx_reports_exceeded() {
        let s = UniformBoxSampler { dim: 1, lo: 0.0, hi: 1.0 };
        let r = estimate_nx(&s, &[5.0], 1, &NxOptions::new(100, 0.99, 8)).unwrap();
        match r {
            NxEstimate::Exceeded { last } => assert_eq!(last.estimate, 0.0),
            other => panic!("expected exceeded, got {other:?}"),
        }
    }
}
