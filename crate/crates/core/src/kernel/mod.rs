//! Kernel quadrature for periodic Sobolev kernels on `[0, 1]^d`.

mod hc;
mod quadrature;
mod sobolev;

use thiserror::Error;

use crate::hull::HullError;

pub use hc::{eigenspace_l4_ratio, kernel_moment_ratio, sobolev_hc_params, SobolevHc};
pub use quadrature::{
    build_kernel_quadrature, kernel_integral, mercer_reconstruction_error, mercer_verify,
    residual_tail_bound, wce, wce_squared, wce_squared_truncated, KernelQuadrature, MercerCheck,
};
pub use sobolev::{
    bernoulli_poly, mercer_spectrum, tensor_eigs_above, EigTag, MercerSpectrum, SobolevKernel,
    TensorEigenfunction,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Hull(#[from] HullError),
}
