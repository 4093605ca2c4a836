//! Numerical toolkit for bounded linear operators between spaces of
//! holomorphic functions in several complex variables.
//!
//! Operators are handled in coefficient coordinates ([`kernelop::OperatorMatrix`])
//! and through their holomorphic kernels on complementary cylinders
//! ([`kernelop::KernelCoefficients`]). On complete Reinhardt domains the
//! [`circled`] module splits functions and operators along the primitive
//! exponent directions `k`, with every quantitative estimate checked against
//! sup-norm brackets from [`series::sup_norm`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circled;
pub mod domains;
pub mod error;
mod fourier;
pub mod kernelop;
pub mod multiindex;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use multiindex::{MultiIndex, PrimitiveIndex};
pub use num_complex::Complex64;
pub use series::{LaurentSeries, NormBounds, PowerSeries};
