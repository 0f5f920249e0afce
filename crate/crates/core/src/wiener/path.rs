use std::sync::Arc;

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::tensor::TruncatedTensor;
use super::words::WordBasis;
use crate::hull::{stream_rng, HullError};
use crate::scalar::Scalar;

/// Piecewise-linear path in `ℝ^{d+1}` on `[0, 1]` whose coordinate 0 is time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiecewiseLinearPath {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl PiecewiseLinearPath {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self, HullError> {
        if times.len() < 2 {
            return Err(HullError::InvalidArgument("a path needs at least 2 knots".into()));
        }
        if times.len() != values.len() {
            return Err(HullError::DimensionMismatch {
                expected: times.len(),
                found: values.len(),
            });
        }
        if times[0] != 0.0 || *times.last().unwrap() != 1.0 {
            return Err(HullError::InvalidArgument("times must run from 0 to 1".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(HullError::InvalidArgument("times must be increasing".into()));
        }
        let width = values[0].len();
        if width < 2 {
            return Err(HullError::InvalidArgument("values need a time and at least one space coordinate".into()));
        }
        for (t, v) in times.iter().zip(&values) {
            if v.len() != width {
                return Err(HullError::DimensionMismatch {
                    expected: width,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(HullError::NonFinite("path values"));
            }
            if v[0] != *t {
                return Err(HullError::InvalidArgument("coordinate 0 must equal time".into()));
            }
        }
        Ok(PiecewiseLinearPath { times, values })
    }

    /// Number of Brownian coordinates `d`.
    pub fn d(&self) -> usize {
        self.values[0].len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn segments(&self) -> usize {
        self.times.len() - 1
    }

    pub fn increments(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.values
            .windows(2)
            .map(|w| w[1].iter().zip(&w[0]).map(|(b, a)| b - a).collect())
    }
}

/// Signature truncated at the basis weight, as a Chen fold of segment
/// exponentials.
pub fn signature<T: Scalar>(
    path: &PiecewiseLinearPath,
    basis: &Arc<WordBasis>,
) -> Result<TruncatedTensor<T>, HullError> {
    if path.d() != basis.d() {
        return Err(HullError::DimensionMismatch {
            expected: basis.d(),
            found: path.d(),
        });
    }
    let mut sig = TruncatedTensor::identity(basis.clone());
    for inc in path.increments() {
        let inc: Vec<T> = inc.into_iter().map(T::from_f64_lossy).collect();
        sig.extend_by_segment(&inc)?;
    }
    Ok(sig)
}

/// Brownian path on a uniform grid of `partitions` steps drawn from `rng`.
pub fn sample_bm_path_from(rng: &mut dyn RngCore, d: usize, partitions: usize) -> PiecewiseLinearPath {
    assert!(d >= 1 && partitions >= 1);
    let h = 1.0 / partitions as f64;
    let sd = h.sqrt();
    let mut times = Vec::with_capacity(partitions + 1);
    let mut values = Vec::with_capacity(partitions + 1);
    let mut cur = vec![0.0; d + 1];
    times.push(0.0);
    values.push(cur.clone());
    for k in 1..=partitions {
        let t = if k == partitions { 1.0 } else { k as f64 * h };
        cur[0] = t;
        for c in cur.iter_mut().skip(1) {
            let z: f64 = StandardNormal.sample(&mut *rng);
            *c += sd * z;
        }
        times.push(t);
        values.push(cur.clone());
    }
    PiecewiseLinearPath { times, values }
}

/// Brownian path from stream 0 of `seed`.
pub fn sample_bm_path(d: usize, partitions: usize, seed: u64) -> Result<PiecewiseLinearPath, HullError> {
    if d == 0 || partitions == 0 {
        return Err(HullError::InvalidArgument("d and partitions must be positive".into()));
    }
    Ok(sample_bm_path_from(&mut stream_rng(seed, 0), d, partitions))
}

/// `E[S(B)]` for Brownian motion with Stratonovich integrals:
/// `exp(e_0 + ½ Σ_i e_i e_i)`.
pub fn expected_bm_signature<T: Scalar>(basis: &Arc<WordBasis>) -> TruncatedTensor<T> {
    let mut gen = vec![T::zero(); basis.len()];
    if let Some(i) = basis.index_of(&[0]) {
        gen[i] = T::one();
    }
    let half = T::from_f64_lossy(0.5);
    for l in 1..=basis.d() as u8 {
        if let Some(i) = basis.index_of(&[l, l]) {
            gen[i] = half;
        }
    }
    TruncatedTensor::from_coeffs(basis.clone(), gen)
        .and_then(|g| g.exp())
        .expect("generator is finite with zero constant term")
}

/// Exact expected signature of the piecewise-linear interpolation of Brownian
/// motion on `partitions` uniform steps, `E[exp(Δ)]^{⊗ partitions}`.
pub fn expected_discretized_signature<T: Scalar>(
    basis: &Arc<WordBasis>,
    partitions: usize,
) -> Result<TruncatedTensor<T>, HullError> {
    if partitions == 0 {
        return Err(HullError::InvalidArgument("partitions must be positive".into()));
    }
    let h = 1.0 / partitions as f64;
    let mut seg = vec![0.0f64; basis.len()];
    let mut counts = vec![0usize; basis.d() + 1];
    for (i, s) in seg.iter_mut().enumerate() {
        let w = &basis.word(i).letters;
        counts.iter_mut().for_each(|c| *c = 0);
        for &l in w {
            counts[l as usize] += 1;
        }
        // E[Π Δ] = h^{#0} Π_i E[(√h Z)^{c_i}]
        let mut e = h.powi(counts[0] as i32);
        for &c in &counts[1..] {
            e *= if c % 2 == 1 {
                0.0
            } else {
                (1..c).step_by(2).map(|j| j as f64).product::<f64>() * h.powf(c as f64 / 2.0)
            };
        }
        let fact: f64 = (1..=w.len()).map(|k| k as f64).product();
        *s = e / fact;
    }
    let seg = TruncatedTensor::from_coeffs(basis.clone(), seg.into_iter().map(T::from_f64_lossy).collect())?;
    let mut out = seg.clone();
    for _ in 1..partitions {
        out = out.chen_product(&seg)?;
    }
    Ok(out)
}
