use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the geometric core is written against: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Default membership tolerance on the phase-one objective.
    fn default_tolerance() -> Self;

    /// Relative threshold below which a pivot or reduced cost counts as zero.
    fn pivot_epsilon() -> Self;

    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn default_tolerance() -> Self {
        1e-9
    }

    fn pivot_epsilon() -> Self {
        1e-11
    }
}

impl Scalar for f32 {
    fn default_tolerance() -> Self {
        1e-4
    }

    fn pivot_epsilon() -> Self {
        1e-6
    }
}
