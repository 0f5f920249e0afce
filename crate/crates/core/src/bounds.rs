//! Closed-form sample-complexity bounds and hypercontractivity condition
//! checks.
//!
//! Every calculator is a pure function of its inputs. The `*_report`
//! variants wrap the same numbers in a [`BoundReport`] that echoes the inputs
//! and states the inequality being instantiated.

use std::f64::consts::E;

use serde::Serialize;
use thiserror::Error;

use crate::hull::stream_rng;
use crate::special::zeta_tail;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("integer overflow evaluating {0}")]
    Overflow(&'static str),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, BoundError> {
    Err(BoundError::InvalidInput(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    Tukey,
    LogConcave,
    Moment,
    WienerChaosK,
    WienerN,
    GrpHc,
    KernelHc,
}

impl BoundName {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundName::Tukey => "tukey",
            BoundName::LogConcave => "log_concave",
            BoundName::Moment => "moment",
            BoundName::WienerChaosK => "wiener_chaos_K",
            BoundName::WienerN => "wiener_N",
            BoundName::GrpHc => "grp_hc",
            BoundName::KernelHc => "kernel_hc",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundValue {
    Real(f64),
    Integer(u64),
    Interval { lower: f64, upper: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: BoundName,
    pub inputs: Vec<(String, f64)>,
    pub value: BoundValue,
    /// Present iff the report is a condition check.
    pub satisfied: Option<bool>,
    pub clause: &'static str,
    /// Intermediate quantities (sums, powers) behind the verdict.
    pub details: Vec<(String, f64)>,
    /// Individual inequalities of a condition check.
    pub conditions: Vec<(String, bool)>,
}

impl BoundReport {
    fn plain(name: BoundName, inputs: Vec<(&str, f64)>, value: BoundValue, clause: &'static str) -> Self {
        BoundReport {
            name,
            inputs: inputs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            value,
            satisfied: None,
            clause,
            details: Vec::new(),
            conditions: Vec::new(),
        }
    }
}

/// `ceil(x)` that treats values within 1e−12 (relative) of an integer as that
/// integer, so `3·1/(1/3)` is 9 and not 10.
fn ceil_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// `(1/(2α), ⌈3D/α⌉)`: lower and upper bounds on `N_X(θ)` from the Tukey
/// depth `α = α_X(θ)`.
pub fn tukey_bound(d: u64, alpha: f64) -> Result<(f64, u64), BoundError> {
    if d == 0 {
        return invalid("D must be positive");
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("Tukey depth must lie in (0, 1], got {alpha}"));
    }
    let upper = ceil_snapped(3.0 * d as f64 / alpha);
    if upper > u64::MAX as f64 {
        return Err(BoundError::Overflow("tukey upper bound"));
    }
    Ok((1.0 / (2.0 * alpha), upper as u64))
}

pub fn tukey_report(d: u64, alpha: f64) -> Result<BoundReport, BoundError> {
    let (lower, upper) = tukey_bound(d, alpha)?;
    Ok(BoundReport::plain(
        BoundName::Tukey,
        vec![("D", d as f64), ("alpha", alpha)],
        BoundValue::Interval { lower, upper },
        "1/(2 alpha) <= N_X(theta) <= ceil(3 D / alpha), alpha = Tukey depth of theta",
    ))
}

/// `⌈3eD⌉`, the bound on `N_X(E[X])` for log-concave `X` in `ℝ^D`.
pub fn log_concave_bound(d: u64) -> u64 {
    (3.0 * E * d as f64).ceil() as u64
}

pub fn log_concave_report(d: u64) -> BoundReport {
    BoundReport::plain(
        BoundName::LogConcave,
        vec![("D", d as f64)],
        BoundValue::Integer(log_concave_bound(d)),
        "N_X(E[X]) <= ceil(3 e D) for log-concave X (Tukey depth of the mean >= 1/e)",
    )
}

/// `17(1 + 9K⁶/4)D` given `‖c·(X − EX)‖_{L³} ≤ K‖c·(X − EX)‖_{L²}` for all `c`.
///
/// An `L⁴/L²` constant is also admissible here since `‖·‖_{L³} ≤ ‖·‖_{L⁴}`.
pub fn moment_bound(d: u64, k: f64) -> Result<f64, BoundError> {
    if d == 0 {
        return invalid("D must be positive");
    }
    if !(k >= 1.0) || !k.is_finite() {
        return invalid(format!("moment constant K must be >= 1, got {k}"));
    }
    let k2 = k * k;
    Ok(17.0 * (1.0 + 9.0 * k2 * k2 * k2 / 4.0) * d as f64)
}

pub fn moment_report(d: u64, k: f64) -> Result<BoundReport, BoundError> {
    let v = moment_bound(d, k)?;
    Ok(BoundReport::plain(
        BoundName::Moment,
        vec![("D", d as f64), ("K", k)],
        BoundValue::Real(v),
        "N_X(E[X]) <= 17 (1 + 9 K^6 / 4) D when |c.(X - EX)|_L3 <= K |c.(X - EX)|_L2 for all c",
    ))
}

/// `(p − 1)^{n/2}`: `‖X‖_{L^p} ≤ (p−1)^{n/2}‖X‖_{L²}` on the Wiener chaos of
/// order at most `n`.
pub fn wiener_chaos_constant(n: u32, p: f64) -> Result<f64, BoundError> {
    if !(p > 2.0) || !p.is_finite() {
        return invalid(format!("p must be a finite real > 2, got {p}"));
    }
    Ok((p - 1.0).powf(n as f64 / 2.0))
}

pub fn wiener_chaos_report(n: u32, p: f64) -> Result<BoundReport, BoundError> {
    let v = wiener_chaos_constant(n, p)?;
    Ok(BoundReport::plain(
        BoundName::WienerChaosK,
        vec![("n", n as f64), ("p", p)],
        BoundValue::Real(v),
        "|X|_Lp <= (p - 1)^(n/2) |X|_L2 for X in the chaos of order <= n",
    ))
}

/// `17(1 + 18·8^{m−1})D`: enough Brownian paths for weighted degree `m`
/// signature features in dimension `D`.
pub fn wiener_n_bound(d: u64, m: u32) -> Result<u64, BoundError> {
    if d == 0 || m == 0 {
        return invalid("D and m must be positive");
    }
    let pow = 8u64
        .checked_pow(m - 1)
        .ok_or(BoundError::Overflow("8^(m-1)"))?;
    18u64
        .checked_mul(pow)
        .and_then(|x| x.checked_add(1))
        .and_then(|x| x.checked_mul(17))
        .and_then(|x| x.checked_mul(d))
        .ok_or(BoundError::Overflow("17 (1 + 18 8^(m-1)) D"))
}

pub fn wiener_n_report(d: u64, m: u32) -> Result<BoundReport, BoundError> {
    let v = wiener_n_bound(d, m)?;
    Ok(BoundReport::plain(
        BoundName::WienerN,
        vec![("D", d as f64), ("m", m as f64)],
        BoundValue::Integer(v),
        "P{E[phi(B)] in cv{phi(B_1..B_N)}} >= 1/2 for N >= 17 (1 + 18 8^(m-1)) D",
    ))
}

/// Analytic tail `λ_m = scale · m^{−exponent}` for every index beyond an
/// explicit eigenvalue list.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawTail {
    pub scale: f64,
    pub exponent: f64,
}

impl PowerLawTail {
    /// `Σ_{m ≥ start} λ_m^e`, infinite when the series diverges.
    pub fn power_sum(&self, e: f64, start: u64) -> f64 {
        let s = self.exponent * e;
        if s <= 1.0 {
            return f64::INFINITY;
        }
        self.scale.powf(e) * zeta_tail(s, start)
    }

    pub fn value(&self, m: u64) -> f64 {
        self.scale * (m as f64).powf(-self.exponent)
    }
}

/// Sufficient condition for `(2, 4; t)`-hypercontractivity of a graded family
/// with weights `λ_1 ≥ λ_2 ≥ …` (the constant level `λ_0 = 1` excluded).
///
/// The verdict uses `Σ λ_m^{t−s} ≤ 1/√3` and `λ_1^t ≤ 1/2`. The variant
/// `Σ λ_m^{2(t−s)} ≤ 1/√3` used by the Cauchy–Schwarz argument is reported
/// alongside as the `proof_form` condition; it is implied by the first.
pub fn grp_hc_check(
    lambdas: &[f64],
    tail: Option<PowerLawTail>,
    s: f64,
    t: f64,
) -> Result<BoundReport, BoundError> {
    if !(s > 0.0) || !(t > s) || !t.is_finite() {
        return invalid(format!("need 0 < s < t, got s = {s}, t = {t}"));
    }
    let lambda1 = match (lambdas.first(), tail) {
        (Some(&l), _) => l,
        (None, Some(tl)) => tl.value(1),
        (None, None) => return invalid("no eigenvalues supplied"),
    };
    if !(lambda1 < 1.0) {
        return invalid(format!("lambda_1 must be < 1, got {lambda1}"));
    }
    if lambdas.iter().any(|l| !(*l > 0.0 && *l <= 1.0)) {
        return invalid("eigenvalues must lie in (0, 1]");
    }
    if lambdas.windows(2).any(|w| w[1] > w[0]) {
        return invalid("eigenvalues must be nonincreasing");
    }
    if let Some(tl) = tail {
        if !(tl.scale > 0.0 && tl.exponent > 0.0) {
            return invalid("power-law tail needs positive scale and exponent");
        }
    }
    let sum = |e: f64| -> f64 {
        let head: f64 = lambdas.iter().rev().map(|l| l.powf(e)).sum();
        let rest = tail.map_or(0.0, |tl| tl.power_sum(e, lambdas.len() as u64 + 1));
        head + rest
    };
    let bound = 1.0 / 3f64.sqrt();
    let statement_sum = sum(t - s);
    let proof_sum = sum(2.0 * (t - s));
    let lambda1_t = lambda1.powf(t);
    let statement_ok = statement_sum <= bound;
    let proof_ok = proof_sum <= bound;
    // Relative slack so that λ_1 = 1/3, t = log_3 2 counts as equality.
    let lambda_ok = lambda1_t <= 0.5 * (1.0 + 1e-12);
    let mut inputs = vec![("s".to_string(), s), ("t".to_string(), t)];
    for (i, l) in lambdas.iter().enumerate() {
        inputs.push((format!("lambda_{}", i + 1), *l));
    }
    if let Some(tl) = tail {
        inputs.push(("tail_scale".into(), tl.scale));
        inputs.push(("tail_exponent".into(), tl.exponent));
    }
    Ok(BoundReport {
        name: BoundName::GrpHc,
        inputs,
        value: BoundValue::Real(t),
        satisfied: Some(statement_ok && lambda_ok),
        clause: "(2,4;t)-hypercontractive if sum_m lambda_m^(t-s) <= 1/sqrt(3) and lambda_1^t <= 1/2, \
                 given |X_m|_L4 <= lambda_m^(-s) |X_m|_L2",
        details: vec![
            ("statement_sum".into(), statement_sum),
            ("proof_sum".into(), proof_sum),
            ("lambda1_pow_t".into(), lambda1_t),
            ("threshold".into(), bound),
        ],
        conditions: vec![
            ("statement_form".into(), statement_ok),
            ("proof_form".into(), proof_ok),
            ("lambda1_pow_t_le_half".into(), lambda_ok),
        ],
    })
}

/// Kernel-level sufficient condition for `(2, 4; r + s)`-hypercontractivity,
/// stated through `‖K₀‖`, `tr K₀` and `‖k₀‖_{L⁴(μ⊗μ)}`.
///
/// `diag_sup`, when given, is `sup_x |k₀(x, x)|`; at most `1/√3` implies
/// `(2, 4; 2)`-hypercontractivity directly.
pub fn kernel_hc_check(
    op_norm: f64,
    trace: f64,
    l4_norm: f64,
    r: f64,
    s: f64,
    diag_sup: Option<f64>,
) -> Result<BoundReport, BoundError> {
    if !(op_norm > 0.0 && op_norm < 1.0) {
        return invalid(format!("operator norm must lie in (0, 1), got {op_norm}"));
    }
    if !(trace > 0.0) || !(l4_norm > 0.0) {
        return invalid("trace and L4 norm must be positive");
    }
    if !(r >= 1.0) || !(s >= 1.0) {
        return invalid("r and s must be >= 1");
    }
    let c1 = op_norm.powf(-(r + s));
    let c2 = op_norm.powf(-(r - 1.0));
    let c3 = op_norm.powf(-(s - 1.0));
    let ok1 = c1 >= 2.0;
    let ok2 = c2 >= 3f64.sqrt() * trace;
    let ok3 = c3 >= l4_norm;
    let mut conditions = vec![
        ("norm_pow_neg_r_plus_s_ge_2".into(), ok1),
        ("norm_pow_neg_r_minus_1_ge_sqrt3_trace".into(), ok2),
        ("norm_pow_neg_s_minus_1_ge_l4".into(), ok3),
    ];
    let mut inputs = vec![
        ("op_norm".to_string(), op_norm),
        ("trace".to_string(), trace),
        ("l4_norm".to_string(), l4_norm),
        ("r".to_string(), r),
        ("s".to_string(), s),
    ];
    if let Some(sup) = diag_sup {
        inputs.push(("diag_sup".into(), sup));
        conditions.push(("diag_sup_le_inv_sqrt3".into(), sup.abs() <= 1.0 / 3f64.sqrt()));
    }
    Ok(BoundReport {
        name: BoundName::KernelHc,
        inputs,
        value: BoundValue::Real(r + s),
        satisfied: Some(ok1 && ok2 && ok3),
        clause: "(2,4;r+s)-hypercontractive if |K0|^-(r+s) >= 2, |K0|^-(r-1) >= sqrt(3) tr K0, \
                 |K0|^-(s-1) >= |k0|_L4; sup|k0(x,x)| <= 1/sqrt(3) gives (2,4;2)",
        details: vec![
            ("norm_pow_neg_r_plus_s".into(), c1),
            ("norm_pow_neg_r_minus_1".into(), c2),
            ("sqrt3_trace".into(), 3f64.sqrt() * trace),
            ("norm_pow_neg_s_minus_1".into(), c3),
        ],
        conditions,
    })
}

/// Largest `‖c·X‖_{L⁴} / ‖c·X‖_{L²}` over `directions` random unit vectors for
/// `X` with i.i.d. centred coordinates, computed from the exact expansion
/// `E(c·X)⁴ = Σ c_i⁴ E X⁴ + 3 Σ_{i≠j} c_i² c_j² (E X²)²`.
pub fn khintchine_worst_ratio(
    moments: [f64; 4],
    d: usize,
    directions: usize,
    seed: u64,
) -> Result<f64, BoundError> {
    let [m1, m2, _m3, m4] = moments;
    if m1.abs() > 1e-12 {
        return invalid(format!("coordinates must be centred, E X = {m1}"));
    }
    if !(m2 > 0.0) || !(m4 >= m2 * m2) {
        return invalid("need E X^2 > 0 and E X^4 >= (E X^2)^2");
    }
    if d == 0 || directions == 0 {
        return invalid("D and directions must be positive");
    }
    let mut rng = stream_rng(seed, 0);
    let dirs = crate::hull::random_unit_vectors(&mut rng, directions, d);
    let worst = dirs
        .iter()
        .map(|c| {
            let s2: f64 = c.iter().map(|x| x * x).sum();
            let s4: f64 = c.iter().map(|x| x.powi(4)).sum();
            let fourth = s4 * m4 + 3.0 * (s2 * s2 - s4) * m2 * m2;
            fourth.powf(0.25) / (m2 * s2).sqrt()
        })
        .fold(0.0f64, f64::max);
    Ok(worst)
}

/// Whether `‖c·X‖_{L⁴} ≤ K‖c·X‖_{L²}` holds for every sampled direction
/// (relative slack 1e−12 for equality cases).
pub fn khintchine_check(
    moments: [f64; 4],
    k: f64,
    d: usize,
    directions: usize,
    seed: u64,
) -> Result<bool, BoundError> {
    if !(k > 0.0) {
        return invalid("K must be positive");
    }
    let worst = khintchine_worst_ratio(moments, d, directions, seed)?;
    Ok(worst <= k * (1.0 + 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn tukey_examples() {
        assert_eq!(tukey_bound(1, 0.5).unwrap(), (1.0, 6));
        let (lo, hi) = tukey_bound(10, 1.0 / E).unwrap();
        assert!((lo - E / 2.0).abs() < 1e-15);
        assert_eq!(hi, 82);
        assert_eq!(tukey_bound(1, 1.0).unwrap(), (0.5, 3));
        assert_eq!(tukey_bound(1, 1.0 / 3.0).unwrap().1, 9);
        assert!(tukey_bound(1, 0.0).is_err());
        assert!(tukey_bound(1, 1.5).is_err());
    }

    #[test]
    fn log_concave_examples() {
        assert_eq!(log_concave_bound(1), 9);
        assert_eq!(log_concave_bound(10), 82);
        assert_eq!(log_concave_bound(100), 816);
    }

    #[test]
    fn moment_examples() {
        assert_eq!(moment_bound(4, 1.0).unwrap(), 221.0);
        assert!((moment_bound(1, 2f64.sqrt()).unwrap() - 323.0).abs() < 1e-12);
        assert!(moment_bound(0, 1.0).is_err());
        assert!(moment_bound(1, 0.9).is_err());
    }

    #[test]
    fn chaos_constants() {
        assert_eq!(wiener_chaos_constant(0, 3.7).unwrap(), 1.0);
        assert_eq!(wiener_chaos_constant(2, 4.0).unwrap(), 3.0);
        for m in 1..6 {
            let v = wiener_chaos_constant(m, 3.0).unwrap();
            assert!((v - 2f64.powf(m as f64 / 2.0)).abs() < 1e-14);
        }
        assert!(wiener_chaos_constant(1, 2.0).is_err());
    }

    #[test]
    fn wiener_n_examples() {
        assert_eq!(wiener_n_bound(1, 1).unwrap(), 323);
        assert_eq!(wiener_n_bound(1, 2).unwrap(), 2465);
        assert_eq!(wiener_n_bound(10, 1).unwrap(), 3230);
        assert!(wiener_n_bound(1, 40).is_err());
    }

    #[test]
    fn grp_sobolev_example() {
        let tail = PowerLawTail { scale: 1.0 / 3.0, exponent: 2.0 };
        let rep = grp_hc_check(&[], Some(tail), 0.1, 1.1).unwrap();
        assert_eq!(rep.satisfied, Some(true));
        let sum = rep.details[0].1;
        assert!((sum - PI * PI / 18.0).abs() < 1e-12);
        assert!(sum <= 1.0 / 3f64.sqrt());
        assert!((rep.details[2].1 - 3f64.powf(-1.1)).abs() < 1e-14);
    }

    #[test]
    fn grp_plug_in_examples() {
        let rep = grp_hc_check(&[0.5], None, 1.0, 3.0).unwrap();
        assert_eq!(rep.satisfied, Some(true));
        assert!((rep.details[0].1 - 0.25).abs() < 1e-15);
        assert!((rep.details[2].1 - 0.125).abs() < 1e-15);
        let rep = grp_hc_check(&[0.9], None, 1.0, 1.05).unwrap();
        assert_eq!(rep.satisfied, Some(false));
        assert!(grp_hc_check(&[1.0], None, 0.1, 1.0).is_err());
        assert!(grp_hc_check(&[0.5], None, 1.0, 0.5).is_err());
    }

    #[test]
    fn divergent_tail_is_not_satisfied() {
        let tail = PowerLawTail { scale: 0.1, exponent: 2.0 };
        let rep = grp_hc_check(&[], Some(tail), 0.1, 0.5).unwrap();
        assert_eq!(rep.satisfied, Some(false));
        assert!(rep.details[0].1.is_infinite());
    }

    #[test]
    fn kernel_examples() {
        let trace = PI * PI / 9.0;
        let rep = kernel_hc_check(1.0 / 3.0, trace, 2.0, 1.0, 1.0, None).unwrap();
        assert_eq!(rep.satisfied, Some(false));
        assert!(rep.conditions[0].1);
        assert!(!rep.conditions[1].1);
        let rep = kernel_hc_check(0.5, 0.25, 1.0, 1.0, 1.0, None).unwrap();
        assert_eq!(rep.satisfied, Some(true));
        assert_eq!(rep.value, BoundValue::Real(2.0));
        let rep = kernel_hc_check(0.5, 0.25, 1.0, 1.0, 1.0, Some(0.5)).unwrap();
        assert!(rep.conditions.iter().any(|(n, ok)| n == "diag_sup_le_inv_sqrt3" && *ok));
        assert!(kernel_hc_check(1.0, 0.25, 1.0, 1.0, 1.0, None).is_err());
    }

    #[test]
    fn khintchine_examples() {
        let rademacher = [0.0, 1.0, 0.0, 1.0];
        assert!(khintchine_check(rademacher, 1.0, 1, 10, 1).unwrap());
        // With D > 1 the cross terms push the ratio above 1.
        assert!(!khintchine_check(rademacher, 1.0, 4, 10, 1).unwrap());
        assert!(khintchine_check(rademacher, 3f64.powf(0.25), 4, 50, 1).unwrap());
        let gaussian = [0.0, 1.0, 0.0, 3.0];
        assert!(khintchine_check(gaussian, 3f64.powf(0.25), 5, 200, 2).unwrap());
        let skewed = [0.0, 2.0, 1.0, 13.0];
        let own = (13.0f64).powf(0.25) / 2f64.sqrt();
        assert!(khintchine_check(skewed, own, 1, 5, 3).unwrap());
        assert!(khintchine_check([0.1, 1.0, 0.0, 3.0], 2.0, 2, 5, 3).is_err());
    }
}
