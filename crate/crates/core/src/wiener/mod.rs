//! Cubature on Wiener space through truncated signatures of piecewise-linear
//! Brownian paths.

mod path;
mod pipeline;
mod tensor;
mod words;

pub use path::{
    expected_bm_signature, expected_discretized_signature, sample_bm_path, sample_bm_path_from,
    signature, PiecewiseLinearPath,
};
pub use pipeline::{build_wiener_cubature, wiener_moment_check, WienerCubature, WienerTarget};
pub use tensor::TruncatedTensor;
pub use words::{weighted_words, Word, WordBasis};
