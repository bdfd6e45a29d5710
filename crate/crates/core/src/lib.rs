//! Numerical toolkit for the critical semilinear problem
//! `−Δu = K(x) u^{(n+2)/(n−2)} + μu` on the unit ball of ℝⁿ.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bubble;
pub mod constants;
pub mod error;
pub mod green;
pub mod numerics;
pub mod pohozaev;
pub mod shoot;
pub mod special;

pub use error::{Error, Result};
