//! Scalar and finite-distribution information measures. All logarithms are
//! base 2.

mod pmf;
mod scalar;

pub use pmf::{cond_mutual_info, Axis, FinitePmf, Kernel};
pub(crate) use scalar::{capf, h2f, starf};
pub use scalar::{gauss_cap, h2, h2_inv, star, Prob};
