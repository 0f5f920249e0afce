use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use super::KernelError;
use crate::special::zeta;

/// Bernoulli polynomial `B_n(x)` for `n ∈ {2, 4, 6, 8}`.
pub fn bernoulli_poly(n: u32, x: f64) -> Result<f64, KernelError> {
    let x2 = x * x;
    let v = match n {
        2 => x2 - x + 1.0 / 6.0,
        4 => x2 * x2 - 2.0 * x2 * x + x2 - 1.0 / 30.0,
        6 => {
            let x4 = x2 * x2;
            x4 * x2 - 3.0 * x4 * x + 2.5 * x4 - 0.5 * x2 + 1.0 / 42.0
        }
        8 => {
            let x4 = x2 * x2;
            x4 * x4 - 4.0 * x4 * x2 * x + 14.0 / 3.0 * x4 * x2 - 7.0 / 3.0 * x4 + 2.0 / 3.0 * x2
                - 1.0 / 30.0
        }
        _ => return Err(KernelError::InvalidInput(format!("B_{n} is not supported (use 2, 4, 6 or 8)"))),
    };
    Ok(v)
}

/// Periodic Sobolev kernel on `[0, 1]`,
/// `k(x, y) = 1 + δ (−1)^{r−1} (2π)^{2r} / (2r)! · B_{2r}(|x − y|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SobolevKernel {
    r: u32,
    delta: f64,
    /// `δ (−1)^{r−1} (2π)^{2r} / (2r)!`
    scale: f64,
}

impl SobolevKernel {
    pub fn new(r: u32, delta: f64) -> Result<Self, KernelError> {
        if !(1..=4).contains(&r) {
            return Err(KernelError::InvalidInput(format!("smoothness r must be in 1..=4, got {r}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(KernelError::InvalidInput(format!("delta must lie in (0, 1), got {delta}")));
        }
        let sign = if r % 2 == 1 { 1.0 } else { -1.0 };
        let fact: f64 = (1..=2 * r).map(f64::from).product();
        let scale = delta * sign * (2.0 * PI).powi(2 * r as i32) / fact;
        Ok(SobolevKernel { r, delta, scale })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Mean-zero part `k₀(x, y) = k(x, y) − 1`.
    pub fn eval0(&self, x: f64, y: f64) -> f64 {
        self.scale * bernoulli_poly(2 * self.r, (x - y).abs()).expect("r validated")
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        1.0 + self.eval0(x, y)
    }

    /// Tensor-product kernel `Π_i k(x_i, y_i)` on `[0, 1]^d`.
    pub fn eval_tensor(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).map(|(a, b)| self.eval(*a, *b)).product()
    }

    /// `k(x, x) = 1 + 2δζ(2r)`, the same for every `x`.
    pub fn diagonal(&self) -> f64 {
        self.eval(0.0, 0.0)
    }

    /// `Σ_ℓ σ_ℓ = 1 + 2δζ(2r)` from the spectrum.
    pub fn trace(&self) -> f64 {
        1.0 + 2.0 * self.delta * zeta(2.0 * self.r as f64)
    }

    pub fn eigenvalue(&self, tag: EigTag) -> f64 {
        match tag.frequency() {
            0 => 1.0,
            m => self.delta * (m as f64).powi(-2 * self.r as i32),
        }
    }
}

/// Eigenfunction of a Sobolev kernel under the uniform measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EigTag {
    Constant,
    /// `√2 cos(2πm·)`
    Cos(u32),
    /// `√2 sin(2πm·)`
    Sin(u32),
}

impl EigTag {
    pub fn frequency(&self) -> u32 {
        match *self {
            EigTag::Constant => 0,
            EigTag::Cos(m) | EigTag::Sin(m) => m,
        }
    }

    fn key(&self) -> (u32, u8) {
        match *self {
            EigTag::Constant => (0, 0),
            EigTag::Cos(m) => (m, 0),
            EigTag::Sin(m) => (m, 1),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            EigTag::Constant => 1.0,
            EigTag::Cos(m) => 2f64.sqrt() * (2.0 * PI * m as f64 * x).cos(),
            EigTag::Sin(m) => 2f64.sqrt() * (2.0 * PI * m as f64 * x).sin(),
        }
    }
}

impl Ord for EigTag {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for EigTag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EigTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigTag::Constant => write!(f, "1"),
            EigTag::Cos(m) => write!(f, "cos{m}"),
            EigTag::Sin(m) => write!(f, "sin{m}"),
        }
    }
}

/// Leading Mercer eigenpairs, nonincreasing in the eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MercerSpectrum {
    pub entries: Vec<(f64, EigTag)>,
}

/// The first `count` eigenpairs: the constant, then cos and sin of frequency
/// 1, 2, …
pub fn mercer_spectrum(k: &SobolevKernel, count: usize) -> MercerSpectrum {
    let mut entries = Vec::with_capacity(count);
    if count > 0 {
        entries.push((1.0, EigTag::Constant));
    }
    let mut m = 1;
    while entries.len() < count {
        for tag in [EigTag::Cos(m), EigTag::Sin(m)] {
            if entries.len() < count {
                entries.push((k.eigenvalue(tag), tag));
            }
        }
        m += 1;
    }
    MercerSpectrum { entries }
}

/// Product eigenfunction `Π_i e_{tag_i}(x_i)` of the tensor kernel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorEigenfunction {
    pub factors: Vec<EigTag>,
    pub eigenvalue: f64,
}

impl TensorEigenfunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.factors.iter().zip(x).map(|(t, xi)| t.eval(*xi)).product()
    }

    pub fn is_constant(&self) -> bool {
        self.factors.iter().all(|t| *t == EigTag::Constant)
    }

    pub fn label(&self) -> String {
        self.factors.iter().map(ToString::to_string).collect::<Vec<_>>().join("*")
    }
}

/// Every tensor eigenfunction on `[0, 1]^d` with eigenvalue at least
/// `threshold`, sorted by eigenvalue (descending) and then by factor tags.
pub fn tensor_eigs_above(
    k: &SobolevKernel,
    d: usize,
    threshold: f64,
) -> Result<Vec<TensorEigenfunction>, KernelError> {
    if d == 0 {
        return Err(KernelError::InvalidInput("dimension d must be positive".into()));
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(KernelError::InvalidInput(format!("threshold must lie in (0, 1], got {threshold}")));
    }
    // Absorb rounding in products such as δ^2 against a threshold of δ^2.
    let cut = threshold * (1.0 - 1e-12);
    let max_freq = ((k.delta / cut).powf(1.0 / (2.0 * k.r as f64))).floor() as u32;
    let mut tags = vec![EigTag::Constant];
    for m in 1..=max_freq {
        tags.push(EigTag::Cos(m));
        tags.push(EigTag::Sin(m));
    }
    let mut out = Vec::new();
    let mut stack: Vec<EigTag> = Vec::with_capacity(d);
    fn dfs(
        k: &SobolevKernel,
        tags: &[EigTag],
        d: usize,
        cut: f64,
        value: f64,
        stack: &mut Vec<EigTag>,
        out: &mut Vec<TensorEigenfunction>,
    ) {
        if stack.len() == d {
            out.push(TensorEigenfunction {
                factors: stack.clone(),
                eigenvalue: value,
            });
            return;
        }
        for &tag in tags {
            let v = value * k.eigenvalue(tag);
            // Eigenvalues are ≤ 1, so the product only shrinks further down.
            if v >= cut {
                stack.push(tag);
                dfs(k, tags, d, cut, v, stack, out);
                stack.pop();
            }
        }
    }
    dfs(k, &tags, d, cut, 1.0, &mut stack, &mut out);
    out.sort_by(|a, b| {
        b.eigenvalue
            .partial_cmp(&a.eigenvalue)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.factors.cmp(&b.factors))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(f: impl Fn(f64) -> f64) -> f64 {
        let n = 20_000;
        (0..n).map(|i| f((i as f64 + 0.5) / n as f64)).sum::<f64>() / n as f64
    }

    #[test]
    fn bernoulli_values() {
        assert!((bernoulli_poly(2, 0.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((bernoulli_poly(2, 0.5).unwrap() + 1.0 / 12.0).abs() < 1e-15);
        assert!((bernoulli_poly(4, 0.0).unwrap() + 1.0 / 30.0).abs() < 1e-15);
        assert!((bernoulli_poly(6, 0.0).unwrap() - 1.0 / 42.0).abs() < 1e-15);
        assert!((bernoulli_poly(8, 0.0).unwrap() + 1.0 / 30.0).abs() < 1e-15);
        for n in [2, 4, 6, 8] {
            let i = integrate(|x| bernoulli_poly(n, x).unwrap());
            assert!(i.abs() < 1e-8, "B_{n} integrates to {i}");
            // B_n(1 − x) = B_n(x) for even n.
            let a = bernoulli_poly(n, 0.3).unwrap();
            assert!((a - bernoulli_poly(n, 0.7).unwrap()).abs() < 1e-14);
        }
        assert!(bernoulli_poly(3, 0.1).is_err());
    }

    #[test]
    fn kernel_values() {
        let k = SobolevKernel::new(1, 1.0 / 3.0).unwrap();
        assert!((k.eval(0.2, 0.2) - (1.0 + PI * PI / 9.0)).abs() < 1e-14);
        for r in 1..=4 {
            let k = SobolevKernel::new(r, 0.4).unwrap();
            assert!((k.diagonal() - k.trace()).abs() < 1e-12, "r={r}");
        }
        let tiny = SobolevKernel::new(2, 1e-14).unwrap();
        assert!((tiny.eval(0.1, 0.8) - 1.0).abs() < 1e-12);
        assert!(SobolevKernel::new(1, 1.0).is_err());
        assert!(SobolevKernel::new(0, 0.5).is_err());
        assert!(SobolevKernel::new(5, 0.5).is_err());
    }

    #[test]
    fn spectrum() {
        let k = SobolevKernel::new(2, 1.0 / 3.0).unwrap();
        let s = mercer_spectrum(&k, 5);
        assert_eq!(s.entries[0], (1.0, EigTag::Constant));
        assert_eq!(s.entries[1].1, EigTag::Cos(1));
        assert!((s.entries[1].0 - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.entries[3].0 - 1.0 / 48.0).abs() < 1e-15);
        assert_eq!(s.entries[4].1, EigTag::Sin(2));
    }

    #[test]
    fn l4_norm_of_cosine() {
        let v = integrate(|x| EigTag::Cos(3).eval(x).powi(4)).powf(0.25);
        assert!((v - 1.5f64.powf(0.25)).abs() < 1e-8);
    }

    #[test]
    fn enumeration() {
        let k = SobolevKernel::new(1, 1.0 / 3.0).unwrap();
        let e = tensor_eigs_above(&k, 2, 0.3).unwrap();
        assert_eq!(e.len(), 5);
        assert!(e[0].is_constant());
        assert!(e[1..].iter().all(|f| (f.eigenvalue - 1.0 / 3.0).abs() < 1e-15));
        assert_eq!(tensor_eigs_above(&k, 3, 1.0).unwrap().len(), 1);
        let e = tensor_eigs_above(&k, 1, 1.0 / 3.0).unwrap();
        let tags: Vec<EigTag> = e.iter().map(|f| f.factors[0]).collect();
        assert_eq!(tags, vec![EigTag::Constant, EigTag::Cos(1), EigTag::Sin(1)]);
        // δ² = 1/9 sits exactly on the threshold.
        let e = tensor_eigs_above(&k, 2, 1.0 / 9.0).unwrap();
        assert_eq!(e.len(), 1 + 4 + 4);
        assert!(tensor_eigs_above(&k, 2, 0.0).is_err());
    }

    #[test]
    fn enumeration_count_nonincreasing() {
        let k = SobolevKernel::new(1, 0.5).unwrap();
        let mut last = usize::MAX;
        for i in 1..40 {
            let n = tensor_eigs_above(&k, 2, i as f64 / 40.0).unwrap().len();
            assert!(n <= last);
            last = n;
        }
    }
}
