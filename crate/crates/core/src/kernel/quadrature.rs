use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sobolev::{tensor_eigs_above, EigTag, SobolevKernel, TensorEigenfunction};
use super::KernelError;
use crate::hull::{construct, stream_rng, Construction, CubatureFormula, PointCloud};

/// Result of the kernel quadrature pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct KernelQuadrature {
    pub construction: Construction<f64>,
    /// Nodes in `[0, 1]^d`, aligned with the formula weights.
    pub points: Vec<Vec<f64>>,
    /// Non-constant eigenfunctions used as features.
    pub features: Vec<TensorEigenfunction>,
    pub threshold: f64,
    pub samples: usize,
}

impl KernelQuadrature {
    pub fn is_success(&self) -> bool {
        self.construction.is_success()
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.construction.formula().map(|f| f.weights.as_slice())
    }
}

/// Samples `n` uniform points of `[0, 1]^d` and looks for at most `D + 1` of
/// them integrating every non-constant eigenfunction above `threshold` to 0.
pub fn build_kernel_quadrature(
    k: &SobolevKernel,
    d: usize,
    threshold: f64,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<KernelQuadrature, KernelError> {
    let features: Vec<TensorEigenfunction> = tensor_eigs_above(k, d, threshold)?
        .into_iter()
        .filter(|f| !f.is_constant())
        .collect();
    let big_d = features.len();
    if n < big_d + 1 || n == 0 {
        return Err(KernelError::InvalidInput(format!(
            "need N >= D + 1 = {} samples, got {n}",
            big_d + 1
        )));
    }
    let points: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            (0..d).map(|_| rng.random::<f64>()).collect()
        })
        .collect();
    if big_d == 0 {
        let formula = CubatureFormula {
            indices: vec![0],
            nodes: vec![Vec::new()],
            weights: vec![1.0],
            residual: 0.0,
        };
        return Ok(KernelQuadrature {
            construction: Construction::Success(formula),
            points: vec![points[0].clone()],
            features,
            threshold,
            samples: n,
        });
    }
    let mut data = vec![0.0; n * big_d];
    data.par_chunks_exact_mut(big_d)
        .zip(points.par_iter())
        .for_each(|(row, x)| {
            for (o, f) in row.iter_mut().zip(&features) {
                *o = f.eval(x);
            }
        });
    let cloud = PointCloud::from_flat(big_d, data)?;
    let construction = construct(&cloud, &vec![0.0; big_d], tol)?;
    let support = construction
        .formula()
        .map(|f| f.indices.iter().map(|&i| points[i].clone()).collect())
        .unwrap_or_default();
    Ok(KernelQuadrature {
        construction,
        points: support,
        features,
        threshold,
        samples: n,
    })
}

fn check_formula(nodes: &[Vec<f64>], weights: &[f64], d: usize) -> Result<(), KernelError> {
    if nodes.len() != weights.len() || nodes.is_empty() {
        return Err(KernelError::InvalidInput("nodes and weights must be non-empty and aligned".into()));
    }
    if nodes.iter().any(|x| x.len() != d || x.iter().any(|v| !(0.0..=1.0).contains(v))) {
        return Err(KernelError::InvalidInput(format!("nodes must lie in [0, 1]^{d}")));
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|w| !(*w >= -1e-12)) || (sum - 1.0).abs() > 1e-9 {
        return Err(KernelError::InvalidInput(format!("weights are not convex (sum {sum})")));
    }
    Ok(())
}

/// Squared worst-case error `wᵀ G w − 1` of a convex formula on `[0, 1]^d`
/// for the tensor kernel, clamped at 0 when rounding makes it slightly
/// negative.
pub fn wce_squared(
    nodes: &[Vec<f64>],
    weights: &[f64],
    k: &SobolevKernel,
    d: usize,
) -> Result<f64, KernelError> {
    check_formula(nodes, weights, d)?;
    let quad: f64 = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let row: f64 = nodes
                .iter()
                .zip(weights)
                .map(|(y, wj)| wj * k.eval_tensor(&nodes[i], y))
                .sum();
            weights[i] * row
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let v = quad - 1.0;
    Ok(if v < 0.0 && v > -1e-12 { 0.0 } else { v.max(0.0) })
}

pub fn wce(nodes: &[Vec<f64>], weights: &[f64], k: &SobolevKernel, d: usize) -> Result<f64, KernelError> {
    wce_squared(nodes, weights, k, d).map(f64::sqrt)
}

/// `Σ σ_ℓ (Σ_i w_i e_ℓ(x_i))²` over the non-constant tensor eigenfunctions
/// above `threshold`: the truncated Mercer form of `wce²`.
pub fn wce_squared_truncated(
    nodes: &[Vec<f64>],
    weights: &[f64],
    k: &SobolevKernel,
    d: usize,
    threshold: f64,
) -> Result<f64, KernelError> {
    check_formula(nodes, weights, d)?;
    let eigs = tensor_eigs_above(k, d, threshold)?;
    Ok(eigs
        .iter()
        .filter(|f| !f.is_constant())
        .map(|f| {
            let m: f64 = nodes.iter().zip(weights).map(|(x, w)| w * f.eval(x)).sum();
            f.eigenvalue * m * m
        })
        .sum())
}

/// `4 sup_x r(x)` with `r(x) = Σ σ_ℓ e_ℓ(x)²` over the eigenfunctions below
/// `threshold`.
///
/// Each eigenvalue comes with its whole cos/sin family, so `r` is constant and
/// equals `(1 + 2δζ(2r))^d − Σ_{σ_ℓ ≥ threshold} σ_ℓ`.
pub fn residual_tail_bound(k: &SobolevKernel, d: usize, threshold: f64) -> Result<f64, KernelError> {
    let kept: f64 = tensor_eigs_above(k, d, threshold)?.iter().map(|f| f.eigenvalue).sum();
    let total = k.trace().powi(d as i32);
    Ok(4.0 * (total - kept).max(0.0))
}

/// Largest `|Σ_ℓ σ_ℓ e_ℓ(x) e_ℓ(y) − k(x, y)|` over a probe grid, the sum
/// running over the eigenpairs above `threshold`.
pub fn mercer_reconstruction_error(
    k: &SobolevKernel,
    threshold: f64,
    probes: usize,
) -> Result<f64, KernelError> {
    let eigs = tensor_eigs_above(k, 1, threshold)?;
    let grid: Vec<f64> = (0..probes).map(|i| (i as f64 + 0.5) / probes as f64).collect();
    let mut worst = 0.0f64;
    for &x in &grid {
        for &y in &grid {
            let s: f64 = eigs
                .iter()
                .map(|f| f.eigenvalue * f.factors[0].eval(x) * f.factors[0].eval(y))
                .sum();
            worst = worst.max((s - k.eval(x, y)).abs());
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MercerCheck {
    pub passed: bool,
    pub max_error: f64,
    /// Eigenpair with the largest error.
    pub worst: Option<(f64, EigTag)>,
}

const PROBES: [f64; 5] = [0.0, 0.123_456_7, 0.37, 0.5, 0.81];

/// Checks `∫₀¹ k(x, y) e(y) dy = σ e(x)` at fixed probe points for every
/// listed pair with a composite midpoint rule on `panels` panels.
///
/// Integration runs in `u = y − x (mod 1)`, so the kink of `k` at `y = x`
/// falls on a panel boundary.
pub fn mercer_verify(
    k: &SobolevKernel,
    pairs: &[(f64, EigTag)],
    panels: usize,
    tol: f64,
) -> Result<MercerCheck, KernelError> {
    if panels == 0 {
        return Err(KernelError::InvalidInput("panels must be positive".into()));
    }
    let h = 1.0 / panels as f64;
    let mut max_error = 0.0f64;
    let mut worst = None;
    for &(sigma, tag) in pairs {
        for &x in &PROBES {
            let integral: f64 = (0..panels)
                .map(|j| {
                    let u = (j as f64 + 0.5) * h;
                    let y = (x + u).fract();
                    k.eval(x, y) * tag.eval(y)
                })
                .sum::<f64>()
                * h;
            let err = (integral - sigma * tag.eval(x)).abs();
            if err > max_error {
                max_error = err;
                worst = Some((sigma, tag));
            }
        }
    }
    Ok(MercerCheck {
        passed: max_error <= tol,
        max_error,
        worst,
    })
}

/// Five-point Gauss–Legendre rule on `[0, 1]`, exact for degree ≤ 9.
const GL_NODES: [f64; 5] = [
    0.046_910_077_030_668_004,
    0.230_765_344_947_158_45,
    0.5,
    0.769_234_655_052_841_6,
    0.953_089_922_969_332,
];
const GL_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_094_54,
    0.239_314_335_249_683_23,
    0.284_444_444_444_444_45,
    0.239_314_335_249_683_23,
    0.118_463_442_528_094_54,
];

/// `∫₀¹ k(x, y) dy`. On `[0, x]` and `[x, 1]` the integrand is a polynomial
/// of degree `2r ≤ 8`, which Gauss–Legendre integrates exactly.
pub fn kernel_integral(k: &SobolevKernel, x: f64) -> f64 {
    let piece = |a: f64, b: f64| -> f64 {
        GL_NODES
            .iter()
            .zip(&GL_WEIGHTS)
            .map(|(t, w)| w * k.eval(x, a + (b - a) * t))
            .sum::<f64>()
            * (b - a)
    };
    piece(0.0, x) + piece(x, 1.0)
}
