//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Exp1, StandardNormal};

use cubature_core::bounds::{log_concave_bound, moment_bound, wiener_chaos_constant, wiener_n_bound};
use cubature_core::hull::{
    empirical_moment_ratio, estimate_p, membership, recombine, stream_rng, wendel_probability,
    Centering, GaussianSampler,
};
use cubature_core::kernel::{
    build_kernel_quadrature, kernel_integral, mercer_spectrum, mercer_verify, residual_tail_bound,
    sobolev_hc_params, tensor_eigs_above, wce_squared, SobolevKernel,
};
use cubature_core::poly::{
    build_poly_cubature, exact_moment, HermiteFeatures, MonomialFeatures, ProductDistribution,
    Univariate,
};
use cubature_core::special::zeta;
use cubature_core::wiener::{
    build_wiener_cubature, expected_bm_signature, sample_bm_path_from, signature, wiener_moment_check,
    WienerTarget, WordBasis,
};
use cubature_core::PointCloud;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn wendel_oracle() -> Outcome {
    let mut worst = String::new();
    let mut ok = true;
    for d in [2usize, 3, 5] {
        for n in [d + 1, 2 * d, 4 * d] {
            let exact = wendel_probability(n as u64, d as u64);
            let est = estimate_p::<f64, _>(&GaussianSampler { dim: d }, &vec![0.0; d], n, 10_000, 0.99, 20_240_601)
                .expect("estimate");
            let inside = est.ci_low <= exact && exact <= est.ci_high;
            if !inside {
                ok = false;
                worst = format!("D={d} N={n}: exact {exact:.4} outside [{:.4}, {:.4}]", est.ci_low, est.ci_high);
            }
        }
    }
    let detail = if ok { "9/9 exact probabilities inside the 99% Wilson interval".into() } else { worst };
    outcome(ok, detail)
}

fn bound_exactness() -> Outcome {
    let lc = log_concave_bound(10);
    let mb = moment_bound(4, 1.0).unwrap();
    let wn = wiener_n_bound(1, 1).unwrap();
    let mb2 = moment_bound(1, 2f64.sqrt()).unwrap();
    let wc = wiener_chaos_constant(2, 4.0).unwrap();
    // K = √2 enters through K^23; the result is 323 up to one rounding of √2.
    let ok = lc == 82
        && mb == 221.0
        && wn == 323
        && (mb2 - 323.0).abs() <= 1e-12 * 323.0
        && wc == 3.0;
    outcome(
        ok,
        format!("log_concave(10)={lc} moment(4,1)={mb} wiener_N(1,1)={wn} moment(1,√2)={mb2} chaos(2,4)={wc}"),
    )
}

fn polynomial_pipeline() -> Outcome {
    let dist = ProductDistribution::new(Univariate::Uniform01, 2);
    let features = MonomialFeatures::new(2, 3);
    let big_d = features.feature_dim();
    let mut successes = 0;
    let mut max_nodes = 0;
    let mut max_residual = 0.0f64;
    for run in 0..20u64 {
        let out = build_poly_cubature::<f64>(&dist, 3, 10 * big_d, 1000 + run, 1e-9).unwrap();
        let Some(f) = out.construction.formula() else { continue };
        successes += 1;
        max_nodes = max_nodes.max(f.len());
        for idx in features.indices() {
            let exact = exact_moment(&dist, idx).unwrap();
            let got: f64 = f
                .weights
                .iter()
                .zip(&out.points)
                .map(|(w, x)| w * x.iter().zip(&idx.exponents).map(|(xi, &e)| xi.powi(e as i32)).product::<f64>())
                .sum();
            max_residual = max_residual.max((got - exact).abs());
        }
    }
    let ok = big_d == 9 && successes >= 10 && max_nodes <= 10 && max_residual <= 1e-9;
    outcome(
        ok,
        format!("D={big_d} successes {successes}/20, max nodes {max_nodes}, max moment residual {max_residual:.2e}"),
    )
}

fn gaussian_hypercontractivity() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=4u32 {
        let sampler = HermiteFeatures::new(2, n).gaussian_sampler();
        let r = empirical_moment_ratio(&sampler, 4.0, 50, 1_000_000, 77 + n as u64, Centering::None).unwrap();
        let bound = 3f64.powf(n as f64 / 2.0);
        ok &= r.ratio <= bound * 1.02;
        parts.push(format!("n={n}: {:.3} <= {:.3}", r.ratio, bound));
    }
    outcome(ok, parts.join(", "))
}

fn wiener_pipeline() -> Outcome {
    let basis = std::sync::Arc::new(WordBasis::new(2, 3));
    let big_d = basis.len() - 1;
    let target: Vec<f64> = expected_bm_signature::<f64>(&basis).features().to_vec();
    let mut successes = 0;
    let mut max_residual = 0.0f64;
    for run in 0..10u64 {
        let out = build_wiener_cubature::<f64>(2, 3, 10 * big_d, 64, 500 + run, 1e-9, WienerTarget::Brownian).unwrap();
        if let Some(f) = out.construction.formula() {
            successes += 1;
            let mean = f.weighted_mean();
            let r = mean.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            max_residual = max_residual.max(r);
        }
    }

    // Monte Carlo oracle for the target, words of weight ≤ 4.
    let oracle_basis = std::sync::Arc::new(WordBasis::new(2, 4));
    let exact = expected_bm_signature::<f64>(&oracle_basis);
    let paths = 100_000u64;
    let chunks = 100u64;
    use rayon::prelude::*;
    let sums: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(99, c);
            let len = oracle_basis.len();
            let (mut s1, mut s2) = (vec![0.0; len], vec![0.0; len]);
            for _ in 0..paths / chunks {
                let p = sample_bm_path_from(&mut rng, 2, 256);
                let sig = signature::<f64>(&p, &oracle_basis).unwrap();
                for (k, v) in sig.coeffs().iter().enumerate() {
                    s1[k] += v;
                    s2[k] += v * v;
                }
            }
            (s1, s2)
        })
        .collect();
    let len = oracle_basis.len();
    let (mut s1, mut s2) = (vec![0.0; len], vec![0.0; len]);
    for (a, b) in sums {
        for k in 0..len {
            s1[k] += a[k];
            s2[k] += b[k];
        }
    }
    let n = paths as f64;
    let mut worst_z = 0.0f64;
    let mut oracle_ok = true;
    for k in 0..len {
        let mean = s1[k] / n;
        let var = (s2[k] / n - mean * mean).max(0.0);
        let se = (var / n).sqrt();
        let diff = (mean - exact.coeffs()[k]).abs();
        if se < 1e-12 {
            oracle_ok &= diff < 1e-9;
        } else {
            worst_z = worst_z.max(diff / se);
        }
    }
    oracle_ok &= worst_z <= 4.0;
    let ok = successes >= 1 && max_residual <= 1e-8 && oracle_ok;
    outcome(
        ok,
        format!(
            "D={big_d} successes {successes}/10, max residual {max_residual:.2e}; oracle over {len} words, worst |z| {worst_z:.2}"
        ),
    )
}

fn wiener_l3() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in 1..=3usize {
        let r = wiener_moment_check(2, m, 50, 200_000, 64, 31 + m as u64).unwrap();
        let bound = 2f64.powf(m as f64 / 2.0);
        ok &= r.ratio <= bound * 1.02;
        parts.push(format!("m={m}: {:.3} <= {:.3}", r.ratio, bound));
    }
    outcome(ok, parts.join(", "))
}

fn kernel_suite() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();

    let mut mercer_err = 0.0f64;
    for r in [1, 2] {
        let k = SobolevKernel::new(r, 1.0 / 3.0).unwrap();
        let spec = mercer_spectrum(&k, 17);
        let c = mercer_verify(&k, &spec.entries, 2048, 1e-6).unwrap();
        ok &= c.passed;
        mercer_err = mercer_err.max(c.max_error);
    }
    parts.push(format!("mercer max err {mercer_err:.1e}"));

    let mut int_err = 0.0f64;
    for r in 1..=4 {
        let k = SobolevKernel::new(r, 1.0 / 3.0).unwrap();
        for i in 0..=100 {
            int_err = int_err.max((kernel_integral(&k, i as f64 / 100.0) - 1.0).abs());
        }
    }
    ok &= int_err <= 1e-10;
    parts.push(format!("|∫k dy − 1| ≤ {int_err:.1e}"));

    let h1 = sobolev_hc_params(1, 1.0 / 3.0).unwrap();
    ok &= h1.s == 0.1 && h1.t == 1.1 && h1.report.satisfied == Some(true);
    let t_paper = 2f64.ln() / 3f64.ln();
    for r in 2..=4 {
        let h = sobolev_hc_params(r, 1.0 / 3.0).unwrap();
        ok &= h.t == t_paper && 2.0 * r as f64 * (h.t - h.s) >= 2.0;
    }
    let lhs = zeta(2.0) / 3.0;
    let rhs = 1.0 / 3f64.sqrt();
    ok &= lhs <= rhs;
    parts.push(format!("(s,t)=(0.1,1.1) r=1, t=log_3 2 r>=2, ζ(2)/3={lhs:.4} <= {rhs:.4}"));

    let mut built = 0;
    let mut succeeded = 0;
    let mut worst_margin = f64::INFINITY;
    for r in [1, 2] {
        let k = SobolevKernel::new(r, 1.0 / 3.0).unwrap();
        for d in [1usize, 2] {
            for threshold in [0.05, 0.1, 0.3, 1.0 / 3.0] {
                let big_d = tensor_eigs_above(&k, d, threshold).unwrap().len() - 1;
                let bound = residual_tail_bound(&k, d, threshold).unwrap();
                for seed in 0..5u64 {
                    let q = build_kernel_quadrature(&k, d, threshold, 10 * (big_d + 1), seed, 1e-9).unwrap();
                    built += 1;
                    if let Some(w) = q.weights() {
                        succeeded += 1;
                        let e = wce_squared(&q.points, w, &k, d).unwrap();
                        worst_margin = worst_margin.min(bound - e);
                    }
                }
            }
        }
    }
    ok &= succeeded > 0 && worst_margin >= 0.0;
    parts.push(format!("{succeeded}/{built} quadratures built, min (tail bound − wce²) {worst_margin:.3e}"));
    outcome(ok, parts.join("; "))
}

fn recombination_properties() -> Outcome {
    let mut failures = Vec::new();
    let mut max_err = 0.0f64;
    for case in 0..1000u64 {
        let mut rng = stream_rng(4242, case);
        let d = rng.random_range(1..=8usize);
        let n = rng.random_range(1..=200usize);
        let mut pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        // Duplicates and a degenerate span now and then.
        if case % 7 == 0 && n > 2 {
            pts[1] = pts[0].clone();
        }
        if case % 11 == 0 {
            for p in pts.iter_mut() {
                p[0] = 0.0;
            }
        }
        let mut w: Vec<f64> = (0..n)
            .map(|_| if rng.random::<f64>() < 0.1 { 0.0 } else { Exp1.sample(&mut rng) })
            .collect();
        if w.iter().all(|&x| x == 0.0) {
            w[0] = 1.0;
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let cloud = PointCloud::new(pts.clone()).unwrap();
        let mean = cloud.weighted_mean(&w);
        let f = match recombine(&cloud, &w, 1e-9) {
            Ok(f) => f,
            Err(e) => {
                failures.push(format!("case {case}: {e}"));
                continue;
            }
        };
        let sum: f64 = f.weights.iter().sum();
        let err = f
            .weighted_mean()
            .iter()
            .zip(&mean)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        max_err = max_err.max(err);
        let subset_ok = f.indices.iter().zip(&f.nodes).all(|(&i, p)| pts[i] == *p);
        if f.len() > d + 1 || f.weights.iter().any(|&x| x < 0.0) || (sum - 1.0).abs() > 1e-9 || err > 1e-9 || !subset_ok {
            failures.push(format!("case {case}: support {} err {err:.2e}", f.len()));
        }

        // Monotonicity: inside the hull of a prefix implies inside the hull of all points.
        let k = rng.random_range(1..=n);
        let prefix = PointCloud::new(pts[..k].to_vec()).unwrap();
        let theta: Vec<f64> = (0..d).map(|_| { let z: f64 = StandardNormal.sample(&mut rng); 0.3 * z }).collect();
        let theta = if rng.next_u32().is_multiple_of(2) { theta } else { mean.clone() };
        if let (Ok(a), Ok(b)) = (membership(&prefix, &theta, 1e-9), membership(&cloud, &theta, 1e-9)) {
            if a.inside && !b.inside {
                failures.push(format!("case {case}: monotonicity violated"));
            }
        }
    }
    let ok = failures.is_empty();
    let detail = if ok {
        format!("1000/1000 instances, max mean error {max_err:.2e}")
    } else {
        format!("{} failures, first: {}", failures.len(), failures[0])
    };
    outcome(ok, detail)
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 8] = [
        ("wendel oracle", wendel_oracle, Duration::from_secs(60)),
        ("bound calculator exactness", bound_exactness, Duration::from_secs(60)),
        ("polynomial pipeline", polynomial_pipeline, Duration::from_secs(60)),
        ("gaussian hypercontractivity", gaussian_hypercontractivity, Duration::from_secs(120)),
        ("wiener pipeline", wiener_pipeline, Duration::from_secs(300)),
        ("wiener L3 bound", wiener_l3, Duration::from_secs(300)),
        ("kernel suite", kernel_suite, Duration::from_secs(180)),
        ("recombination properties", recombination_properties, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = o.passed && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.1}s / {}s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
