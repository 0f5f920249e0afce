//! Carathéodory recombination: shrink a convex combination to at most `D + 1`
//! atoms without moving its mean.

use super::{check_vector, euclidean_distance, CubatureFormula, HullError, PointCloud};
use crate::linalg::{least_squares, null_space, Matrix};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ReductionStrategy {
    /// One kernel vector per factorisation; one atom removed per step.
    #[default]
    Single,
    /// Use the whole null space of each factorisation, re-orthogonalising the
    /// remaining vectors against every removed atom.
    Batch,
}

#[derive(Clone, Copy, Debug)]
pub struct RecombineOptions<T> {
    pub tol: T,
    pub strategy: ReductionStrategy,
    /// Refit the final weights by least squares against the target.
    pub polish: bool,
}

impl<T: Scalar> RecombineOptions<T> {
    pub fn new(tol: T) -> Self {
        RecombineOptions {
            tol,
            strategy: ReductionStrategy::Single,
            polish: true,
        }
    }
}

/// Reduces `weights` over `cloud` to at most `D + 1` atoms that keep the
/// weighted mean `θ = Σ w_i p_i`.
pub fn recombine<T: Scalar>(
    cloud: &PointCloud<T>,
    weights: &[T],
    tol: T,
) -> Result<CubatureFormula<T>, HullError> {
    validate_weights(cloud, weights, tol)?;
    let target = cloud.weighted_mean(weights);
    reduce(cloud, weights, &target, &RecombineOptions::new(tol))
}

/// Like [`recombine`] but measures the residual (and polishes) against an
/// explicit `target`, which may differ from `Σ w_i p_i` by up to `tol`.
pub fn recombine_towards<T: Scalar>(
    cloud: &PointCloud<T>,
    weights: &[T],
    target: &[T],
    tol: T,
) -> Result<CubatureFormula<T>, HullError> {
    validate_weights(cloud, weights, tol)?;
    check_vector(target, cloud.dim(), "target")?;
    reduce(cloud, weights, target, &RecombineOptions::new(tol))
}

pub(crate) fn validate_weights<T: Scalar>(
    cloud: &PointCloud<T>,
    weights: &[T],
    tol: T,
) -> Result<(), HullError> {
    if weights.len() != cloud.len() {
        return Err(HullError::DimensionMismatch {
            expected: cloud.len(),
            found: weights.len(),
        });
    }
    if !(tol > T::zero()) {
        return Err(HullError::InvalidArgument("tolerance must be positive".into()));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < T::zero()) {
        return Err(HullError::NotConvex(format!("weight {w} is negative or non-finite")));
    }
    let total: T = weights.iter().copied().sum();
    if (total - T::one()).abs() > tol.max(T::epsilon() * T::from_f64_lossy(64.0)) {
        return Err(HullError::NotConvex(format!("weights sum to {total}")));
    }
    Ok(())
}

/// Core reduction loop, shared with the pipelines.
pub(crate) fn reduce<T: Scalar>(
    cloud: &PointCloud<T>,
    weights: &[T],
    target: &[T],
    opts: &RecombineOptions<T>,
) -> Result<CubatureFormula<T>, HullError> {
    let d = cloud.dim();
    let mut support: Vec<usize> = (0..cloud.len()).filter(|&i| weights[i] > T::zero()).collect();
    let mut w: Vec<T> = support.iter().map(|&i| weights[i]).collect();
    if support.is_empty() {
        return Err(HullError::NotConvex("all weights are zero".into()));
    }

    while support.len() > d + 1 {
        let m = stacked(cloud, &support);
        let (mut kernel, _) = null_space(&m, T::epsilon() * T::from_f64_lossy(16.0));
        if kernel.is_empty() {
            return Err(HullError::Numerical(format!(
                "no kernel vector for {} points in dimension {d}",
                support.len()
            )));
        }
        if opts.strategy == ReductionStrategy::Single {
            kernel.truncate(1);
        }
        let mut k = 0;
        while k < kernel.len() && support.len() > d + 1 {
            let v = kernel[k].clone();
            let removed = eliminate(&mut w, &v)?;
            // Make the remaining vectors vanish at the removed atom.
            for u in kernel.iter_mut().skip(k + 1) {
                let f = u[removed] / v[removed];
                for (ui, vi) in u.iter_mut().zip(&v) {
                    *ui = *ui - f * *vi;
                }
                u.remove(removed);
            }
            support.remove(removed);
            w.remove(removed);
            k += 1;
            // Dropping further atoms would invalidate the remaining vectors.
            if drop_zeros(&mut support, &mut w) {
                break;
            }
        }
    }

    if opts.polish {
        polish(cloud, &support, &mut w, target);
    }

    let total: T = w.iter().copied().sum();
    for x in &mut w {
        *x = *x / total;
    }
    let nodes: Vec<Vec<T>> = support.iter().map(|&i| cloud.point(i).to_vec()).collect();
    let mut formula = CubatureFormula {
        indices: support,
        nodes,
        weights: w,
        residual: T::zero(),
    };
    formula.residual = euclidean_distance(&formula.weighted_mean(), target);
    if !(formula.residual <= opts.tol) {
        return Err(HullError::Numerical(format!(
            "residual {} exceeds tolerance {}",
            formula.residual, opts.tol
        )));
    }
    Ok(formula)
}

/// `(D + 1) × n` matrix of the support points stacked over a row of ones.
fn stacked<T: Scalar>(cloud: &PointCloud<T>, support: &[usize]) -> Matrix<T> {
    let d = cloud.dim();
    Matrix::from_fn(d + 1, support.len(), |i, j| {
        if i < d {
            cloud.point(support[j])[i]
        } else {
            T::one()
        }
    })
}

/// Moves `w` along `-v` until the first weight hits zero. Returns the index of
/// that weight (lowest index on ties), which is set to exactly zero.
fn eliminate<T: Scalar>(w: &mut [T], v: &[T]) -> Result<usize, HullError> {
    let mut v = v.to_vec();
    if !v.iter().any(|x| *x > T::zero()) {
        for x in &mut v {
            *x = -*x;
        }
    }
    let mut best: Option<(usize, T)> = None;
    for (i, (&wi, &vi)) in w.iter().zip(&v).enumerate() {
        if vi > T::zero() {
            let ratio = wi / vi;
            match best {
                Some((_, r)) if ratio >= r => {}
                _ => best = Some((i, ratio)),
            }
        }
    }
    let (idx, alpha) =
        best.ok_or_else(|| HullError::Numerical("kernel vector has no positive entry".into()))?;
    for (wi, vi) in w.iter_mut().zip(&v) {
        *wi = (*wi - alpha * *vi).max(T::zero());
    }
    w[idx] = T::zero();
    Ok(idx)
}

fn drop_zeros<T: Scalar>(support: &mut Vec<usize>, w: &mut Vec<T>) -> bool {
    let before = w.len();
    let mut i = 0;
    while i < w.len() {
        if w[i] == T::zero() {
            support.remove(i);
            w.remove(i);
        } else {
            i += 1;
        }
    }
    w.len() != before
}

/// Refits the weights of the final support so that `[P; 1] w = [θ; 1]` holds
/// to working precision. Kept only when the refit is nonnegative and no worse.
fn polish<T: Scalar>(cloud: &PointCloud<T>, support: &[usize], w: &mut Vec<T>, target: &[T]) {
    let m = stacked(cloud, support);
    let mut rhs = target.to_vec();
    rhs.push(T::one());
    let Some(refit) = least_squares(&m, &rhs, T::epsilon() * T::from_f64_lossy(1e3)) else {
        return;
    };
    if refit.iter().any(|x| !x.is_finite() || *x < T::zero()) {
        return;
    }
    let err = |x: &[T]| euclidean_distance(&m.mul_vec(x), &rhs);
    if err(&refit) <= err(w) {
        *w = refit;
    }
}
