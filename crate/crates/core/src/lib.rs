//! Exact cumulative distribution functions for the variance-gamma law
//! VG(ν, α, β, μ) and for the mean of n independent products of correlated
//! zero-mean normal variables.
//!
//! The CDF is evaluated as an infinite series of normalised incomplete
//! Bessel integrals G_{ν+k,ν}/G̃_{ν+k,ν}, which are themselves closed
//! expressions in K_ν and the modified Lommel function t̃_{μ,ν}. An
//! independent adaptive quadrature of the density is shipped alongside for
//! verification.
//!
//! ```
//! use vgcdf::{VarianceGamma, VgParams};
//!
//! let vg = VarianceGamma::new(VgParams::new(0.5, 1.0, 0.5, 0.0).unwrap());
//! assert!((vg.cdf(0.0).unwrap() - 0.25).abs() < 1e-12);
//! ```

pub mod error;
pub mod kernels;
pub mod oracle;
pub mod product_normal;
mod quad;
pub mod selfcheck;
pub mod series;
pub mod special;
pub mod vg;

pub use error::{Error, Result};
pub use kernels::{g_lower, g_upper, incomplete_bessel_integral, KernelArgs, Side};
pub use product_normal::ProductNormalParams;
pub use series::{Diagnostics, EvalResult, Method, SeriesControl};
pub use vg::{VarianceGamma, VgParams};
