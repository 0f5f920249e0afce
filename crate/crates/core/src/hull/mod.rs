//! Convex hull membership, recombination and the Monte Carlo estimators built
//! on top of them.

mod depth;
mod estimate;
mod recombine;
mod rng;
mod sampler;
mod simplex;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Scalar;

pub(crate) use depth::random_unit_vectors;
pub use depth::{empirical_moment_ratio, tukey_depth_upper, Centering, MomentRatio};
pub use estimate::{
    estimate_nx, estimate_p, wendel_probability, wilson_interval, NxEstimate, NxOptions,
    ProbabilityEstimate,
};
pub use recombine::{recombine, recombine_towards, RecombineOptions, ReductionStrategy};
pub use rng::{derive_seed, stream_rng, StreamRng};
pub use sampler::{
    ConstantSampler, FnSampler, GaussianSampler, RademacherSampler, Sampler, SamplerError,
    UniformBoxSampler,
};
pub use simplex::{membership, membership_with, MembershipOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HullError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("point cloud is empty")]
    Empty,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("membership indeterminate: {reason} (phase-one objective {objective:e})")]
    Indeterminate { objective: f64, reason: &'static str },
    #[error("weights are not convex: {0}")]
    NotConvex(String),
    #[error("recombination failed numerically: {0}")]
    Numerical(String),
    #[error("sampler failed at trial {trial}: {source}")]
    Sampler { trial: u64, source: SamplerError },
}

/// `N` points of a common dimension `D`, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointCloud<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> PointCloud<T> {
    pub fn new(points: Vec<Vec<T>>) -> Result<Self, HullError> {
        let dim = points.first().map(Vec::len).ok_or(HullError::Empty)?;
        let mut data = Vec::with_capacity(dim * points.len());
        for p in &points {
            if p.len() != dim {
                return Err(HullError::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            data.extend_from_slice(p);
        }
        Self::from_flat(dim, data)
    }

    pub fn from_flat(dim: usize, data: Vec<T>) -> Result<Self, HullError> {
        if dim == 0 {
            return Err(HullError::InvalidArgument("dimension must be at least 1".into()));
        }
        if data.is_empty() {
            return Err(HullError::Empty);
        }
        if !data.len().is_multiple_of(dim) {
            return Err(HullError::DimensionMismatch {
                expected: dim,
                found: data.len() % dim,
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(HullError::NonFinite("point cloud"));
        }
        Ok(PointCloud { dim, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.dim)
    }

    /// New cloud with the points of `self` followed by those of `other`.
    pub fn concat(&self, other: &PointCloud<T>) -> Result<Self, HullError> {
        if other.dim != self.dim {
            return Err(HullError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(PointCloud { dim: self.dim, data })
    }

    /// `Σ w_i p_i` without any convexity check.
    pub fn weighted_mean(&self, weights: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        for (p, &w) in self.iter().zip(weights) {
            for (o, &x) in out.iter_mut().zip(p) {
                *o = *o + w * x;
            }
        }
        out
    }
}

/// Outcome of a convex hull membership query.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipCertificate<T> {
    pub inside: bool,
    /// Convex weights over the input points; present iff `inside`.
    pub weights: Option<Vec<T>>,
    /// Unit vector `c` with `c·(p − θ) < 0` for every input point; present iff outside.
    pub separating_direction: Option<Vec<T>>,
    /// Final phase-one objective (sum of slacks).
    pub objective: T,
}

/// Support points and convex weights reproducing a target mean.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CubatureFormula<T> {
    /// Positions of the support within the cloud the formula was built from.
    pub indices: Vec<usize>,
    /// Feature vectors of the support points.
    pub nodes: Vec<Vec<T>>,
    pub weights: Vec<T>,
    /// Euclidean distance between the weighted mean and the target.
    pub residual: T,
}

impl<T: Scalar> CubatureFormula<T> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weighted_mean(&self) -> Vec<T> {
        let dim = self.nodes.first().map_or(0, Vec::len);
        let mut out = vec![T::zero(); dim];
        for (p, &w) in self.nodes.iter().zip(&self.weights) {
            for (o, &x) in out.iter_mut().zip(p) {
                *o = *o + w * x;
            }
        }
        out
    }
}

pub(crate) fn check_vector<T: Scalar>(
    v: &[T],
    dim: usize,
    what: &'static str,
) -> Result<(), HullError> {
    if v.len() != dim {
        return Err(HullError::DimensionMismatch {
            expected: dim,
            found: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(HullError::NonFinite(what));
    }
    Ok(())
}

pub(crate) fn euclidean_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y) * (*x - *y))
        .sum::<T>()
        .sqrt()
}

/// Outcome of the sample / test / recombine pipeline.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Construction<T> {
    Success(CubatureFormula<T>),
    /// The target lies outside the hull; `direction` separates it.
    Failure { direction: Vec<T>, objective: T },
}

impl<T> Construction<T> {
    pub fn formula(&self) -> Option<&CubatureFormula<T>> {
        match self {
            Construction::Success(f) => Some(f),
            Construction::Failure { .. } => None,
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, Construction::Success(_))
    }
}

/// Tests whether `target` lies in the hull of `features` and, if so, reduces
/// the certificate weights to at most `D + 1` points.
pub fn construct<T: Scalar>(
    features: &PointCloud<T>,
    target: &[T],
    tol: T,
) -> Result<Construction<T>, HullError> {
    let cert = membership(features, target, tol)?;
    match cert.weights {
        Some(weights) => {
            let formula = recombine_towards(features, &weights, target, tol)?;
            Ok(Construction::Success(formula))
        }
        None => Ok(Construction::Failure {
            direction: cert.separating_direction.unwrap_or_default(),
            objective: cert.objective,
        }),
    }
}
