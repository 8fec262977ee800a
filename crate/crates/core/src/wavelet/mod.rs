//! Orthonormal periodised Daubechies wavelets on dyadic hypercubes.

mod dwt;
mod filter;
mod pyramid;

pub use dwt::{dwt_1d_periodized, dwt_qd, idwt_qd};
pub use filter::{build_filter, build_filter_named, FilterName, WaveletFilter};
pub use pyramid::{besov_sequence_norm, CoefficientPyramid, PyramidShape};
