//! Riemann zeta tails for power-law eigenvalue sums.

/// Bernoulli numbers `B_2, B_4, …, B_12`.
const BERNOULLI_EVEN: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

/// `Σ_{m ≥ start} m^{−s}` for `s > 1`, `start ≥ 1`.
///
/// Sums directly up to `max(start, 32)` and closes the remainder with six
/// Euler–Maclaurin correction terms.
pub fn zeta_tail(s: f64, start: u64) -> f64 {
    assert!(s > 1.0, "zeta tail needs s > 1, got {s}");
    let start = start.max(1);
    let cut = start.max(32);
    let mut head = 0.0;
    // Smallest terms first.
    for m in (start..cut).rev() {
        head += (m as f64).powf(-s);
    }
    let m = cut as f64;
    let mut tail = m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s);
    // Term k ≥ 1: B_2k / (2k)! · s(s+1)…(s+2k−2) · m^{−s−2k+1}
    let mut rising = s;
    let mut fact = 2.0;
    for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = (i + 1) as f64;
        tail += b / fact * rising * m.powf(-s - 2.0 * k + 1.0);
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
    }
    head + tail
}

/// Riemann zeta `ζ(s)` for real `s > 1`.
pub fn zeta(s: f64) -> f64 {
    zeta_tail(s, 1)
}
