use rand::{Rng, RngCore};
use serde::Serialize;

use super::sobolev::{tensor_eigs_above, SobolevKernel};
use super::KernelError;
use crate::bounds::{grp_hc_check, BoundReport, PowerLawTail};
use crate::hull::{empirical_moment_ratio, Centering, FnSampler, MomentRatio, SamplerError};
use crate::special::zeta;

/// `‖√2 cos(2πm·)‖_{L⁴} / ‖·‖_{L²}`, shared by every element of a frequency-`m`
/// eigenspace.
pub fn eigenspace_l4_ratio() -> f64 {
    1.5f64.powf(0.25)
}

#[derive(Clone, Debug, Serialize)]
pub struct SobolevHc {
    pub s: f64,
    pub t: f64,
    /// Whether `(s, t)` are the worked-example values rather than a search result.
    pub worked_example: bool,
    pub report: BoundReport,
}

const GRID: f64 = 1e-3;

/// Hypercontractivity parameters `(s, t)` for the one-dimensional Sobolev
/// family with grades `λ_m = δ m^{−2r}`.
///
/// For `δ = 1/3` the worked-example values are returned: `(0.1, 1.1)` when
/// `r = 1` and `(0.1, log_3 2)` when `r ≥ 2`. Otherwise `s` is the smallest
/// grid value with `δ^{−s} ≥ (3/2)^{1/4}` and `t` the smallest grid value
/// passing [`grp_hc_check`].
pub fn sobolev_hc_params(r: u32, delta: f64) -> Result<SobolevHc, KernelError> {
    let k = SobolevKernel::new(r, delta)?;
    let tail = PowerLawTail {
        scale: k.delta(),
        exponent: 2.0 * r as f64,
    };
    let s_condition = |s: f64| delta.powf(-s) >= eigenspace_l4_ratio();
    let finish = |s: f64, t: f64, worked_example: bool| -> Result<SobolevHc, KernelError> {
        let mut report = grp_hc_check(&[], Some(tail), s, t)
            .map_err(|e| KernelError::InvalidInput(e.to_string()))?;
        let s_ok = s_condition(s);
        report.inputs.push(("r".into(), r as f64));
        report.inputs.push(("delta".into(), delta));
        report.conditions.push(("eigenspace_l4_le_lambda_pow_minus_s".into(), s_ok));
        if worked_example {
            let lhs = zeta(2.0) / 3.0;
            let rhs = 1.0 / 3f64.sqrt();
            report.details.push(("zeta2_over_3".into(), lhs));
            report.conditions.push(("zeta2_over_3_le_inv_sqrt3".into(), lhs <= rhs));
        }
        report.satisfied = report.satisfied.map(|v| v && s_ok);
        Ok(SobolevHc {
            s,
            t,
            worked_example,
            report,
        })
    };
    if (delta - 1.0 / 3.0).abs() < 1e-15 {
        let t = if r == 1 { 1.1 } else { 2f64.ln() / 3f64.ln() };
        return finish(0.1, t, true);
    }
    let s_min = eigenspace_l4_ratio().ln() / (1.0 / delta).ln();
    let s = (s_min / GRID).ceil() * GRID;
    let s = if s_condition(s) { s } else { s + GRID };
    let mut t = s + GRID;
    let mut last = None;
    while t <= 50.0 {
        let report = grp_hc_check(&[], Some(tail), s, t)
            .map_err(|e| KernelError::InvalidInput(e.to_string()))?;
        if report.satisfied == Some(true) {
            return finish(s, t, false);
        }
        last = Some(t);
        t += GRID;
    }
    finish(s, last.unwrap_or(s + GRID), false)
}

/// Largest empirical `‖X‖_{L⁴} / ‖X‖_{L²}` over random unit combinations `X`
/// of the tensor eigenfunctions above `threshold` (constant included) under
/// the uniform measure on `[0, 1]^d`.
pub fn kernel_moment_ratio(
    k: &SobolevKernel,
    d: usize,
    threshold: f64,
    num_directions: usize,
    num_samples: usize,
    seed: u64,
) -> Result<MomentRatio, KernelError> {
    let eigs = tensor_eigs_above(k, d, threshold)?;
    let sampler = FnSampler::new(eigs.len(), move |rng: &mut dyn RngCore, out: &mut [f64]| {
        let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        for (o, f) in out.iter_mut().zip(&eigs) {
            *o = f.eval(&x);
        }
        Ok::<(), SamplerError>(())
    });
    Ok(empirical_moment_ratio(&sampler, 4.0, num_directions, num_samples, seed, Centering::None)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn condition(r: &BoundReport, name: &str) -> bool {
        r.conditions.iter().find(|(n, _)| n == name).map(|c| c.1).unwrap()
    }

    #[test]
    fn worked_example_r1() {
        let h = sobolev_hc_params(1, 1.0 / 3.0).unwrap();
        assert_eq!((h.s, h.t), (0.1, 1.1));
        assert_eq!(h.report.satisfied, Some(true));
        assert!(condition(&h.report, "zeta2_over_3_le_inv_sqrt3"));
    }

    #[test]
    fn worked_example_r2() {
        let h = sobolev_hc_params(2, 1.0 / 3.0).unwrap();
        assert!((h.t - 0.630_929_753_571_457_4).abs() < 1e-15);
        assert!(2.0 * 2.0 * (h.t - h.s) >= 2.0);
        assert!(condition(&h.report, "lambda1_pow_t_le_half"));
        assert!(condition(&h.report, "proof_form"));
        assert!(condition(&h.report, "eigenspace_l4_le_lambda_pow_minus_s"));
    }

    #[test]
    fn searched_parameters() {
        let h = sobolev_hc_params(2, 0.2).unwrap();
        assert_eq!(h.report.satisfied, Some(true));
        let near_one = sobolev_hc_params(1, 0.95).unwrap();
        assert!(near_one.t > 5.0 || near_one.report.satisfied == Some(false));
    }

    #[test]
    fn empirical_ratio_below_bound() {
        let k = SobolevKernel::new(1, 1.0 / 3.0).unwrap();
        let h = sobolev_hc_params(1, 1.0 / 3.0).unwrap();
        let r = kernel_moment_ratio(&k, 1, 1.0 / 3.0, 20, 100_000, 3).unwrap();
        assert!(r.ratio <= (1.0f64 / 3.0).powf(-h.t));
    }
}
