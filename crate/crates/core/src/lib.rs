//! Cubature and quadrature by random convex hulls.
//!
//! Draw i.i.d. feature vectors `φ(X_1), …, φ(X_N)`, decide whether the exact
//! mean `E[φ(X)]` lies in their convex hull with a phase-one simplex, and
//! reduce the resulting convex weights to at most `D + 1` atoms. The crate
//! also evaluates the sample-complexity and hypercontractivity bounds that
//! predict how large `N` must be.
//!
//! The geometric core ([`hull`], [`wiener::TruncatedTensor`], the polynomial
//! feature maps) is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common `f64` instantiations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod hull;
pub mod kernel;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod special;
pub mod wiener;

pub use hull::{
    construct, membership, recombine, Construction, CubatureFormula, HullError,
    MembershipCertificate, PointCloud,
};
pub use scalar::Scalar;

pub type PointCloud64 = hull::PointCloud<f64>;
pub type PointCloud32 = hull::PointCloud<f32>;
pub type CubatureFormula64 = hull::CubatureFormula<f64>;
pub type CubatureFormula32 = hull::CubatureFormula<f32>;
pub type MembershipCertificate64 = hull::MembershipCertificate<f64>;
pub type MembershipCertificate32 = hull::MembershipCertificate<f32>;
pub type TruncatedTensor64 = wiener::TruncatedTensor<f64>;
pub type TruncatedTensor32 = wiener::TruncatedTensor<f32>;
