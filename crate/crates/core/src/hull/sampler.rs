use std::fmt;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct SamplerError(pub String);

/// Source of i.i.d. `D`-dimensional vectors.
pub trait Sampler<T>: Send + Sync {
    fn dim(&self) -> usize;

    /// Writes one draw into `out` (length [`Sampler::dim`]).
    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [T]) -> Result<(), SamplerError>;

    fn sample(&self, rng: &mut dyn RngCore) -> Result<Vec<T>, SamplerError>
    where
        T: Scalar,
    {
        let mut v = vec![T::zero(); self.dim()];
        self.sample_into(rng, &mut v)?;
        Ok(v)
    }
}

/// Standard Gaussian vector.
#[derive(Clone, Copy, Debug)]
pub struct GaussianSampler {
    pub dim: usize,
}

impl<T: Scalar> Sampler<T> for GaussianSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [T]) -> Result<(), SamplerError> {
        for o in out.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *o = T::from_f64_lossy(z);
        }
        Ok(())
    }
}

/// Independent ±1 coordinates.
#[derive(Clone, Copy, Debug)]
pub struct RademacherSampler {
    pub dim: usize,
}

impl<T: Scalar> Sampler<T> for RademacherSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [T]) -> Result<(), SamplerError> {
        for o in out.iter_mut() {
            *o = if rng.random::<bool>() { T::one() } else { -T::one() };
        }
        Ok(())
    }
}

/// Independent uniform coordinates on `[lo, hi)`.
#[derive(Clone, Copy, Debug)]
pub struct UniformBoxSampler {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
}

impl<T: Scalar> Sampler<T> for UniformBoxSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [T]) -> Result<(), SamplerError> {
        for o in out.iter_mut() {
            let u: f64 = rng.random();
            *o = T::from_f64_lossy(self.lo + (self.hi - self.lo) * u);
        }
        Ok(())
    }
}

/// Always returns the same vector.
#[derive(Clone, Debug)]
pub struct ConstantSampler<T> {
    pub value: Vec<T>,
}

impl<T: Scalar> Sampler<T> for ConstantSampler<T> {
    fn dim(&self) -> usize {
        self.value.len()
    }

    fn sample_into(&self, _rng: &mut dyn RngCore, out: &mut [T]) -> Result<(), SamplerError> {
        out.copy_from_slice(&self.value);
        Ok(())
    }
}

/// Adapter for closures, e.g. a base sampler composed with a feature map.
pub struct FnSampler<F> {
    dim: usize,
    f: F,
}

impl<F> FnSampler<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnSampler { dim, f }
    }
}

impl<F> fmt::Debug for FnSampler<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnSampler").field("dim", &self.dim).finish()
    }
}

impl<T, F> Sampler<T> for FnSampler<F>
where
    F: Fn(&mut dyn RngCore, &mut [T]) -> Result<(), SamplerError> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [T]) -> Result<(), SamplerError> {
        (self.f)(rng, out)
    }
}
