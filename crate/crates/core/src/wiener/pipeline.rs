use std::sync::Arc;

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use super::path::{expected_bm_signature, expected_discretized_signature, sample_bm_path_from};
use super::tensor::TruncatedTensor;
use super::words::WordBasis;
use crate::hull::{
    construct, empirical_moment_ratio, stream_rng, Centering, Construction, FnSampler, HullError,
    MomentRatio, PointCloud, SamplerError,
};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub enum WienerTarget {
    /// Expected signature of Brownian motion itself.
    #[default]
    Brownian,
    /// Expected signature of the piecewise-linear interpolation actually
    /// sampled.
    Discretized,
}

/// Result of the Wiener-space sample / test / recombine pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct WienerCubature<T> {
    pub construction: Construction<T>,
    /// Sample indices of the support paths (path `i` is drawn from stream `i`).
    pub path_ids: Vec<usize>,
    /// Feature words, aligned with the formula nodes and any separating direction.
    pub words: Vec<String>,
    pub target: Vec<T>,
    pub target_kind: WienerTarget,
    pub samples: usize,
    pub partitions: usize,
}

impl<T> WienerCubature<T> {
    pub fn is_success(&self) -> bool {
        self.construction.is_success()
    }
}

fn path_signature<T: Scalar>(
    rng: &mut dyn RngCore,
    basis: &Arc<WordBasis>,
    partitions: usize,
) -> TruncatedTensor<T> {
    let path = sample_bm_path_from(rng, basis.d(), partitions);
    let mut sig = TruncatedTensor::identity(basis.clone());
    for inc in path.increments() {
        let inc: Vec<T> = inc.into_iter().map(T::from_f64_lossy).collect();
        sig.extend_by_segment(&inc).expect("increment has the basis width");
    }
    sig
}

/// Samples `n` Brownian paths on `partitions` steps, maps each to its
/// signature on the words of weight `1..=m` and looks for at most `D + 1` of
/// them whose convex combination matches the target expected signature.
#[allow(clippy::too_many_arguments)]
pub fn build_wiener_cubature<T: Scalar>(
    d: usize,
    m: usize,
    n: usize,
    partitions: usize,
    seed: u64,
    tol: T,
    target_kind: WienerTarget,
) -> Result<WienerCubature<T>, HullError> {
    if d == 0 || m == 0 || partitions == 0 {
        return Err(HullError::InvalidArgument("d, m and partitions must be positive".into()));
    }
    let basis = Arc::new(WordBasis::new(d, m));
    let big_d = basis.len() - 1;
    if n < big_d + 1 {
        return Err(HullError::InvalidArgument(format!(
            "need N >= D + 1 = {} paths, got {n}",
            big_d + 1
        )));
    }
    let target: TruncatedTensor<T> = match target_kind {
        WienerTarget::Brownian => expected_bm_signature(&basis),
        WienerTarget::Discretized => expected_discretized_signature(&basis, partitions)?,
    };
    let mut data = vec![T::zero(); n * big_d];
    data.par_chunks_exact_mut(big_d).enumerate().for_each(|(i, row)| {
        let sig = path_signature::<T>(&mut stream_rng(seed, i as u64), &basis, partitions);
        row.copy_from_slice(sig.features());
    });
    let cloud = PointCloud::from_flat(big_d, data)?;
    let target = target.features().to_vec();
    let construction = construct(&cloud, &target, tol)?;
    let path_ids = construction.formula().map(|f| f.indices.clone()).unwrap_or_default();
    Ok(WienerCubature {
        construction,
        path_ids,
        words: basis.words()[1..].iter().map(ToString::to_string).collect(),
        target,
        target_kind,
        samples: n,
        partitions,
    })
}

/// Largest empirical `‖X‖_{L³} / ‖X‖_{L²}` over random unit coefficient
/// vectors `c`, `X = Σ_{‖α‖ ≤ m} c_α I^α(B)` including the empty word.
pub fn wiener_moment_check(
    d: usize,
    m: usize,
    num_directions: usize,
    num_samples: usize,
    partitions: usize,
    seed: u64,
) -> Result<MomentRatio, HullError> {
    if d == 0 || m == 0 || partitions == 0 {
        return Err(HullError::InvalidArgument("d, m and partitions must be positive".into()));
    }
    let basis = Arc::new(WordBasis::new(d, m));
    let sampler = FnSampler::new(basis.len(), move |rng: &mut dyn RngCore, out: &mut [f64]| {
        let sig = path_signature::<f64>(rng, &basis, partitions);
        out.copy_from_slice(sig.coeffs());
        Ok::<(), SamplerError>(())
    });
    empirical_moment_ratio(&sampler, 3.0, num_directions, num_samples, seed, Centering::None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_formula(out: &WienerCubature<f64>, tol: f64) {
        let f = out.construction.formula().unwrap();
        assert!(f.len() <= out.words.len() + 1);
        assert!(f.weights.iter().all(|&w| w >= 0.0));
        assert!((f.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mean = f.weighted_mean();
        for (a, b) in mean.iter().zip(&out.target) {
            assert!((a - b).abs() <= tol);
        }
    }

    #[test]
    fn level_two_single_dimension() {
        let out = build_wiener_cubature::<f64>(1, 2, 40, 16, 3, 1e-9, WienerTarget::Brownian).unwrap();
        assert_eq!(out.words, vec!["(1)", "(0)", "(1,1)"]);
        assert_eq!(out.target, vec![0.0, 1.0, 0.5]);
        check_formula(&out, 1e-9);
    }

    #[test]
    fn first_level_needs_two_paths() {
        let out = build_wiener_cubature::<f64>(1, 1, 10, 4, 1, 1e-9, WienerTarget::Brownian).unwrap();
        let f = out.construction.formula().unwrap();
        assert!(f.len() <= 2);
        check_formula(&out, 1e-9);
    }

    #[test]
    fn discretized_target() {
        let out = build_wiener_cubature::<f64>(2, 3, 190, 8, 4, 1e-9, WienerTarget::Discretized).unwrap();
        assert_eq!(out.words.len(), 19);
        if out.is_success() {
            check_formula(&out, 1e-9);
        }
    }

    #[test]
    fn deterministic() {
        let a = build_wiener_cubature::<f64>(1, 2, 20, 8, 7, 1e-9, WienerTarget::Brownian).unwrap();
        let b = build_wiener_cubature::<f64>(1, 2, 20, 8, 7, 1e-9, WienerTarget::Brownian).unwrap();
        assert_eq!(a.construction, b.construction);
    }

    #[test]
    fn too_few_paths() {
        assert!(build_wiener_cubature::<f64>(2, 3, 19, 8, 4, 1e-9, WienerTarget::Brownian).is_err());
    }

    #[test]
    fn moment_ratio_level_one() {
        let r = wiener_moment_check(1, 1, 20, 100_000, 4, 2).unwrap();
        assert!(r.ratio <= 2f64.sqrt());
    }
}
