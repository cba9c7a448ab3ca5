//! Scalar special functions: ln Γ, K_ν, the normalised Lommel function t̃,
//! the modified Struve function L_ν and the ₂F₁ needed by the CDF formulas.

mod bessel;
mod hypergeometric;
mod lommel;

pub use bessel::{bessel_k, bessel_k_half_integer};
pub use hypergeometric::{hyp2f1_one, LINEAR_TRANSFORM_THRESHOLD};
pub use lommel::{
    lommel_tilde_terms, modified_lommel_tilde, modified_struve_l, modified_struve_l_scaled,
};

pub(crate) use bessel::bessel_k_scaled;
pub(crate) use lommel::ln_lommel_tilde;

use crate::error::{Error, Result};

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("log_gamma requires finite x > 0, got {x}")));
    }
    Ok(ln_gamma(x))
}

/// Unchecked ln Γ for positive arguments.
#[inline]
pub(crate) fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}
