//! Polynomial cubature for product measures on `ℝ^d`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::hull::{construct, stream_rng, Construction, HullError, PointCloud, Sampler, SamplerError};
use crate::scalar::Scalar;

/// Exponent vector of a monomial `x^α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiIndex {
    pub exponents: Vec<u32>,
}

impl MultiIndex {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices in `d` variables of degree at most `m`, in graded
/// lexicographic order: by degree, then by descending exponent of the first
/// variable, then the second, and so on. The zero index comes first.
pub fn multi_indices(d: usize, m: u32) -> Vec<MultiIndex> {
    fn fill(prefix: &mut Vec<u32>, remaining: u32, slots: usize, out: &mut Vec<MultiIndex>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(MultiIndex { exponents: prefix.clone() });
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e);
            fill(prefix, remaining - e, slots - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        return out;
    }
    for deg in 0..=m {
        fill(&mut Vec::with_capacity(d), deg, d, &mut out);
    }
    out
}

pub type DrawFn = Arc<dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync>;

/// Univariate law shared by every coordinate.
#[derive(Clone)]
pub enum Univariate {
    Uniform01,
    StandardGaussian,
    Rademacher,
    /// User-supplied law: `moments[k] = E[X^k]` and a way to draw from it.
    Moments {
        moments: Vec<f64>,
        sampler: DrawFn,
    },
}

impl fmt::Debug for Univariate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Univariate::Uniform01 => write!(f, "Uniform01"),
            Univariate::StandardGaussian => write!(f, "StandardGaussian"),
            Univariate::Rademacher => write!(f, "Rademacher"),
            Univariate::Moments { moments, .. } => {
                f.debug_struct("Moments").field("moments", moments).finish()
            }
        }
    }
}

impl Univariate {
    /// `E[X^k]`, or `None` when a user sequence is too short.
    pub fn moment(&self, k: u32) -> Option<f64> {
        match self {
            Univariate::Uniform01 => Some(1.0 / (k as f64 + 1.0)),
            Univariate::StandardGaussian => Some(if k % 2 == 1 {
                0.0
            } else {
                // (k − 1)!!
                (1..k).step_by(2).map(|j| j as f64).product()
            }),
            Univariate::Rademacher => Some(if k % 2 == 1 { 0.0 } else { 1.0 }),
            Univariate::Moments { moments, .. } => moments.get(k as usize).copied(),
        }
    }

    pub fn draw(&self, rng: &mut dyn RngCore) -> f64 {
        match self {
            Univariate::Uniform01 => rng.random::<f64>(),
            Univariate::StandardGaussian => StandardNormal.sample(rng),
            Univariate::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Univariate::Moments { sampler, .. } => sampler(rng),
        }
    }
}

/// `d` i.i.d. copies of a univariate law.
#[derive(Clone, Debug)]
pub struct ProductDistribution {
    pub kind: Univariate,
    pub dim: usize,
}

impl ProductDistribution {
    pub fn new(kind: Univariate, dim: usize) -> Self {
        ProductDistribution { kind, dim }
    }

    pub fn draw_into(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        for o in out.iter_mut() {
            *o = self.kind.draw(rng);
        }
    }
}

/// `E[X^α] = Π_i E[X_1^{α_i}]`.
pub fn exact_moment(dist: &ProductDistribution, idx: &MultiIndex) -> Result<f64, HullError> {
    if idx.exponents.len() != dist.dim {
        return Err(HullError::DimensionMismatch {
            expected: dist.dim,
            found: idx.exponents.len(),
        });
    }
    idx.exponents.iter().try_fold(1.0, |acc, &e| {
        dist.kind
            .moment(e)
            .map(|m| acc * m)
            .ok_or_else(|| HullError::InvalidArgument(format!("moment of order {e} not supplied")))
    })
}

/// Non-constant monomials of degree `1..=m` in graded lexicographic order.
#[derive(Clone, Debug)]
pub struct MonomialFeatures {
    dim: usize,
    degree: u32,
    indices: Vec<MultiIndex>,
}

impl MonomialFeatures {
    pub fn new(dim: usize, degree: u32) -> Self {
        let indices = multi_indices(dim, degree).into_iter().filter(|a| !a.is_zero()).collect();
        MonomialFeatures { dim, degree, indices }
    }

    pub fn feature_dim(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Writes `x^α` for every feature index into `out`.
    pub fn eval_into<T: Scalar>(&self, x: &[T], out: &mut [T]) {
        debug_assert_eq!(x.len(), self.dim);
        let m = self.degree as usize;
        // powers[i][k] = x_i^k
        let powers: Vec<Vec<T>> = x
            .iter()
            .map(|&xi| {
                let mut p = Vec::with_capacity(m + 1);
                let mut acc = T::one();
                for _ in 0..=m {
                    p.push(acc);
                    acc = acc * xi;
                }
                p
            })
            .collect();
        for (o, idx) in out.iter_mut().zip(&self.indices) {
            *o = idx
                .exponents
                .iter()
                .zip(&powers)
                .fold(T::one(), |acc, (&e, p)| acc * p[e as usize]);
        }
    }

    pub fn target(&self, dist: &ProductDistribution) -> Result<Vec<f64>, HullError> {
        self.indices.iter().map(|a| exact_moment(dist, a)).collect()
    }
}

/// Probabilists' Hermite polynomials normalised in `L²(N(0,1))`:
/// `h_k = He_k / √k!`, `He_{k+1}(x) = x He_k(x) − k He_{k−1}(x)`.
pub fn hermite_normalized(k: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return 1.0;
    }
    let mut cur = x;
    for j in 1..k {
        let next = x * cur - j as f64 * prev;
        prev = cur;
        cur = next;
    }
    let fact: f64 = (1..=k).map(|j| j as f64).product();
    cur / fact.sqrt()
}

/// Orthonormal Hermite products `Π h_{α_i}(x_i)` with `1 ≤ |α| ≤ n`; a
/// linear combination of them is a centred element of the Gaussian chaos of
/// order at most `n`.
#[derive(Clone, Debug)]
pub struct HermiteFeatures {
    dim: usize,
    indices: Vec<MultiIndex>,
}

impl HermiteFeatures {
    pub fn new(dim: usize, degree: u32) -> Self {
        let indices = multi_indices(dim, degree).into_iter().filter(|a| !a.is_zero()).collect();
        HermiteFeatures { dim, indices }
    }

    /// Only the indices of total degree exactly `degree`.
    pub fn homogeneous(dim: usize, degree: u32) -> Self {
        let indices = multi_indices(dim, degree)
            .into_iter()
            .filter(|a| a.degree() == degree)
            .collect();
        HermiteFeatures { dim, indices }
    }

    pub fn feature_dim(&self) -> usize {
        self.indices.len()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        for (o, idx) in out.iter_mut().zip(&self.indices) {
            *o = idx
                .exponents
                .iter()
                .zip(x)
                .map(|(&e, &xi)| hermite_normalized(e, xi))
                .product();
        }
    }

    /// Sampler of `φ(Z)` for `Z ~ N(0, I_d)`.
    pub fn gaussian_sampler(self) -> impl Sampler<f64> {
        let dim = self.dim;
        crate::hull::FnSampler::new(self.feature_dim(), move |rng: &mut dyn RngCore, out: &mut [f64]| {
            let z: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut *rng)).collect();
            self.eval_into(&z, out);
            Ok::<(), SamplerError>(())
        })
    }
}

/// Result of the polynomial sample / test / recombine pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct PolyCubature<T> {
    pub construction: Construction<T>,
    /// Points of `ℝ^d` carrying the weights, aligned with the formula.
    pub points: Vec<Vec<f64>>,
    /// Number of non-constant monomials.
    pub feature_dim: usize,
    pub samples: usize,
}

impl<T> PolyCubature<T> {
    pub fn is_success(&self) -> bool {
        self.construction.is_success()
    }
}

/// Draws `n` points from `dist` (point `i` from stream `i` of `seed`), maps
/// them to the non-constant monomials of degree `≤ m` and tries to reproduce
/// the exact moments with at most `D + 1` of them.
pub fn build_poly_cubature<T: Scalar>(
    dist: &ProductDistribution,
    m: u32,
    n: usize,
    seed: u64,
    tol: T,
) -> Result<PolyCubature<T>, HullError> {
    if dist.dim == 0 {
        return Err(HullError::InvalidArgument("dimension d must be positive".into()));
    }
    let features = MonomialFeatures::new(dist.dim, m);
    let big_d = features.feature_dim();
    if n < big_d + 1 || n == 0 {
        return Err(HullError::InvalidArgument(format!(
            "need N >= D + 1 = {} samples, got {n}",
            big_d + 1
        )));
    }
    let target = features.target(dist)?;
    let points: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut x = vec![0.0; dist.dim];
            dist.draw_into(&mut rng, &mut x);
            x
        })
        .collect();

    if big_d == 0 {
        let formula = crate::hull::CubatureFormula {
            indices: vec![0],
            nodes: vec![Vec::new()],
            weights: vec![T::one()],
            residual: T::zero(),
        };
        return Ok(PolyCubature {
            construction: Construction::Success(formula),
            points: vec![points[0].clone()],
            feature_dim: 0,
            samples: n,
        });
    }

    let mut data = vec![T::zero(); n * big_d];
    data.par_chunks_exact_mut(big_d)
        .zip(points.par_iter())
        .for_each(|(row, x)| {
            let xt: Vec<T> = x.iter().map(|v| T::from_f64_lossy(*v)).collect();
            features.eval_into(&xt, row);
        });
    let cloud = PointCloud::from_flat(big_d, data)?;
    let target_t: Vec<T> = target.iter().map(|v| T::from_f64_lossy(*v)).collect();
    let construction = construct(&cloud, &target_t, tol)?;
    let support = construction
        .formula()
        .map(|f| f.indices.iter().map(|&i| points[i].clone()).collect())
        .unwrap_or_default();
    Ok(PolyCubature {
        construction,
        points: support,
        feature_dim: big_d,
        samples: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn index_counts_and_order() {
        let idx = multi_indices(2, 2);
        let got: Vec<Vec<u32>> = idx.iter().map(|a| a.exponents.clone()).collect();
        assert_eq!(
            got,
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        );
        let got: Vec<Vec<u32>> = multi_indices(1, 3).into_iter().map(|a| a.exponents).collect();
        assert_eq!(got, vec![vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(multi_indices(3, 0).len(), 1);
        for d in 1..5u64 {
            for m in 0..5u64 {
                assert_eq!(multi_indices(d as usize, m as u32).len() as u64, binomial(d + m, m));
            }
        }
    }

    #[test]
    fn moments() {
        let g = ProductDistribution::new(Univariate::StandardGaussian, 1);
        assert_eq!(exact_moment(&g, &MultiIndex { exponents: vec![4] }).unwrap(), 3.0);
        assert_eq!(exact_moment(&g, &MultiIndex { exponents: vec![6] }).unwrap(), 15.0);
        assert_eq!(exact_moment(&g, &MultiIndex { exponents: vec![3] }).unwrap(), 0.0);
        let u = ProductDistribution::new(Univariate::Uniform01, 2);
        assert_eq!(exact_moment(&u, &MultiIndex { exponents: vec![3, 0] }).unwrap(), 0.25);
        assert_eq!(exact_moment(&u, &MultiIndex { exponents: vec![0, 0] }).unwrap(), 1.0);
        let r = ProductDistribution::new(Univariate::Rademacher, 2);
        assert_eq!(exact_moment(&r, &MultiIndex { exponents: vec![2, 1] }).unwrap(), 0.0);
        let user = ProductDistribution::new(
            Univariate::Moments {
                moments: vec![1.0, 0.0, 1.0],
                sampler: Arc::new(|rng: &mut dyn RngCore| StandardNormal.sample(rng)),
            },
            1,
        );
        assert!(exact_moment(&user, &MultiIndex { exponents: vec![3] }).is_err());
        assert!(exact_moment(&u, &MultiIndex { exponents: vec![1] }).is_err());
    }

    #[test]
    fn gaussian_moments_match_monte_carlo() {
        let n = 1_000_000u64;
        let mut rng = stream_rng(42, 0);
        let (mut s4, mut s8) = (0.0, 0.0);
        for _ in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            let z4 = z.powi(4);
            s4 += z4;
            s8 += z4 * z4;
        }
        let mean = s4 / n as f64;
        let se = ((s8 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - 3.0).abs() < 5.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn monomial_evaluation() {
        let f = MonomialFeatures::new(2, 2);
        let mut out = vec![0.0; f.feature_dim()];
        f.eval_into(&[2.0, 3.0], &mut out);
        assert_eq!(out, vec![2.0, 3.0, 4.0, 6.0, 9.0]);
    }

    #[test]
    fn hermite_values() {
        assert_eq!(hermite_normalized(0, 0.3), 1.0);
        assert!((hermite_normalized(2, 1.5) - (1.5f64 * 1.5 - 1.0) / 2f64.sqrt()).abs() < 1e-15);
        let x: f64 = 0.7;
        let he3 = x.powi(3) - 3.0 * x;
        assert!((hermite_normalized(3, x) - he3 / 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_degree_two_line() {
        let g = ProductDistribution::new(Univariate::StandardGaussian, 1);
        let out = build_poly_cubature::<f64>(&g, 2, 200, 5, 1e-9).unwrap();
        let f = out.construction.formula().expect("membership at N = 200");
        assert!(f.len() <= 3);
        let m1: f64 = f.weights.iter().zip(&out.points).map(|(w, x)| w * x[0]).sum();
        let m2: f64 = f.weights.iter().zip(&out.points).map(|(w, x)| w * x[0] * x[0]).sum();
        assert!(m1.abs() < 1e-9 && (m2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_first_moments() {
        let u = ProductDistribution::new(Univariate::Uniform01, 2);
        let out = build_poly_cubature::<f64>(&u, 1, 30, 1, 1e-9).unwrap();
        let f = out.construction.formula().unwrap();
        assert!(f.len() <= 3);
        for k in 0..2 {
            let mk: f64 = f.weights.iter().zip(&out.points).map(|(w, x)| w * x[k]).sum();
            assert!((mk - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn degree_zero_is_a_single_node() {
        let u = ProductDistribution::new(Univariate::Uniform01, 1);
        let out = build_poly_cubature::<f64>(&u, 0, 1, 1, 1e-9).unwrap();
        let f = out.construction.formula().unwrap();
        assert_eq!(f.weights, vec![1.0]);
    }

    #[test]
    fn too_few_samples_is_rejected() {
        let u = ProductDistribution::new(Univariate::Uniform01, 2);
        assert!(build_poly_cubature::<f64>(&u, 2, 5, 1, 1e-9).is_err());
    }
}
