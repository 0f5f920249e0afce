//! Random-projection estimates: Tukey depth upper bound and directional
//! `L^p / L^2` moment ratios.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::rng::stream_rng;
use super::sampler::Sampler;
use super::{check_vector, HullError, PointCloud};
use crate::scalar::Scalar;

const BLOCK: usize = 4096;
/// Stream reserved for drawing projection directions.
const DIRECTION_STREAM: u64 = u64::MAX;

pub(crate) fn random_unit_vectors(rng: &mut dyn RngCore, count: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut *rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            out.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

/// Minimum over random unit directions `c` of the fraction of samples with
/// `c·(x − θ) ≤ 0`. The true depth is an infimum over all directions, so this
/// can only overestimate it.
pub fn tukey_depth_upper<T: Scalar>(
    samples: &PointCloud<T>,
    theta: &[T],
    num_directions: usize,
    seed: u64,
) -> Result<f64, HullError> {
    check_vector(theta, samples.dim(), "theta")?;
    if num_directions == 0 {
        return Err(HullError::InvalidArgument("need at least one direction".into()));
    }
    let dirs = random_unit_vectors(&mut stream_rng(seed, DIRECTION_STREAM), num_directions, samples.dim());
    let n = samples.len() as f64;
    let depth = dirs
        .par_iter()
        .map(|c| {
            let behind = samples
                .iter()
                .filter(|x| {
                    let s: f64 = x
                        .iter()
                        .zip(theta)
                        .zip(c)
                        .map(|((a, b), ci)| (*a - *b).to_f64_lossy() * ci)
                        .sum();
                    s <= 0.0
                })
                .count();
            behind as f64 / n
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(1.0f64, f64::min);
    Ok(depth)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Centering {
    /// Use the samples as drawn.
    None,
    /// Subtract the empirical mean (two passes over the same streams).
    Empirical,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentRatio {
    /// Largest `‖c·X‖_p / ‖c·X‖_2` over the non-degenerate directions.
    pub ratio: f64,
    pub direction: Vec<f64>,
    /// Ratio per direction, `NaN` where the direction was skipped.
    pub ratios: Vec<f64>,
    /// Directions along which the empirical variance vanished.
    pub skipped: usize,
}

/// Max over random unit directions `c` of the empirical `‖c·X‖_{L^p} /
/// ‖c·X‖_{L^2}`.
///
/// Samples are drawn in blocks of 4096, block `b` from stream `b` of `seed`;
/// directions come from a dedicated stream.
pub fn empirical_moment_ratio<T, S>(
    sampler: &S,
    p: f64,
    num_directions: usize,
    num_samples: usize,
    seed: u64,
    centering: Centering,
) -> Result<MomentRatio, HullError>
where
    T: Scalar,
    S: Sampler<T> + ?Sized,
{
    if !(p > 2.0) || !p.is_finite() {
        return Err(HullError::InvalidArgument("p must be a finite real > 2".into()));
    }
    if num_directions == 0 || num_samples == 0 {
        return Err(HullError::InvalidArgument("directions and samples must be positive".into()));
    }
    let dim = sampler.dim();
    let dirs = random_unit_vectors(&mut stream_rng(seed, DIRECTION_STREAM), num_directions, dim);
    let blocks = num_samples.div_ceil(BLOCK);

    let draw_block = |b: usize| -> Result<Vec<f64>, HullError> {
        let mut rng = stream_rng(seed, b as u64);
        let len = BLOCK.min(num_samples - b * BLOCK);
        let mut buf = vec![T::zero(); dim];
        let mut out = Vec::with_capacity(len * dim);
        for _ in 0..len {
            sampler
                .sample_into(&mut rng, &mut buf)
                .map_err(|source| HullError::Sampler { trial: b as u64, source })?;
            out.extend(buf.iter().map(|x| x.to_f64_lossy()));
        }
        Ok(out)
    };

    let mean = match centering {
        Centering::None => vec![0.0; dim],
        Centering::Empirical => {
            let sums = (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let data = draw_block(b)?;
                    let mut s = vec![0.0; dim];
                    for x in data.chunks_exact(dim) {
                        for (si, xi) in s.iter_mut().zip(x) {
                            *si += xi;
                        }
                    }
                    Ok(s)
                })
                .collect::<Result<Vec<_>, HullError>>()?;
            let mut m = vec![0.0; dim];
            for s in sums {
                for (mi, si) in m.iter_mut().zip(s) {
                    *mi += si;
                }
            }
            m.into_iter().map(|x| x / num_samples as f64).collect()
        }
    };

    // Per direction: (Σ|y|^p, Σy²).
    let partial = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let data = draw_block(b)?;
            let mut acc = vec![(0.0f64, 0.0f64); dirs.len()];
            let mut centred = vec![0.0; dim];
            for x in data.chunks_exact(dim) {
                for ((c, xi), mi) in centred.iter_mut().zip(x).zip(&mean) {
                    *c = xi - mi;
                }
                for (a, dir) in acc.iter_mut().zip(&dirs) {
                    let y: f64 = dir.iter().zip(&centred).map(|(u, v)| u * v).sum();
                    let ay = y.abs();
                    a.0 += ay.powf(p);
                    a.1 += y * y;
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>, HullError>>()?;
    let mut totals = vec![(0.0f64, 0.0f64); dirs.len()];
    for acc in partial {
        for (t, a) in totals.iter_mut().zip(acc) {
            t.0 += a.0;
            t.1 += a.1;
        }
    }

    let n = num_samples as f64;
    let mut skipped = 0;
    let mut best: Option<(f64, usize)> = None;
    let ratios: Vec<f64> = totals
        .iter()
        .enumerate()
        .map(|(k, (sp, s2))| {
            let second = s2 / n;
            if !(second > 1e-24) {
                skipped += 1;
                return f64::NAN;
            }
            let r = (sp / n).powf(1.0 / p) / second.sqrt();
            if best.is_none_or(|(b, _)| r > b) {
                best = Some((r, k));
            }
            r
        })
        .collect();
    let (ratio, k) = best.ok_or_else(|| {
        HullError::InvalidArgument("every direction has zero variance".into())
    })?;
    Ok(MomentRatio {
        ratio,
        direction: dirs[k].clone(),
        ratios,
        skipped,
    })
}
