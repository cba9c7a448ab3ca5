//! Mean of n independent copies of Z = U·V, where (U, V) is a zero-mean
//! bivariate normal pair with standard deviations σ_U, σ_V and correlation ρ.
//!
//! With s = σ_U·σ_V,
//!
//!   Z̄_n ∼ VG((n−1)/2, n/(s(1−ρ²)), nρ/(s(1−ρ²)), 0),
//!
//! so every probability here is a variance-gamma probability.

use crate::error::{Error, Result};
use crate::series::{EvalResult, SeriesControl};
use crate::special::{hyp2f1_one, ln_gamma};
use crate::vg::{VarianceGamma, VgParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductNormalParams {
    sigma_u: f64,
    sigma_v: f64,
    rho: f64,
    n: u32,
}

impl ProductNormalParams {
    /// Requires σ_U, σ_V > 0, |ρ| < 1 and n ≥ 1.
    pub fn new(sigma_u: f64, sigma_v: f64, rho: f64, n: u32) -> Result<Self> {
        if !(sigma_u > 0.0 && sigma_u.is_finite()) || !(sigma_v > 0.0 && sigma_v.is_finite()) {
            return Err(Error::params(format!(
                "require sigma_u > 0 and sigma_v > 0, got sigma_u={sigma_u}, sigma_v={sigma_v}"
            )));
        }
        if !(rho.abs() < 1.0) {
            return Err(Error::params(format!("require |rho| < 1, got rho={rho}")));
        }
        if n == 0 {
            return Err(Error::params("require n >= 1, got n=0"));
        }
        Ok(Self {
            sigma_u,
            sigma_v,
            rho,
            n,
        })
    }

    pub fn sigma_u(&self) -> f64 {
        self.sigma_u
    }

    pub fn sigma_v(&self) -> f64 {
        self.sigma_v
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// The variance-gamma parameters of the sample mean.
    pub fn to_vg(&self) -> VgParams {
        let n = f64::from(self.n);
        let s = self.sigma_u * self.sigma_v;
        let denom = s * (1.0 - self.rho) * (1.0 + self.rho);
        VgParams::new(0.5 * (n - 1.0), n / denom, n * self.rho / denom, 0.0)
            .expect("|rho| < 1 keeps |beta| < alpha")
    }

    fn distribution(&self, ctl: &SeriesControl) -> Result<VarianceGamma> {
        VarianceGamma::with_control(self.to_vg(), *ctl)
    }

    /// P(Z̄_n ≤ x).
    pub fn mean_product_cdf(&self, x: f64, ctl: &SeriesControl) -> Result<EvalResult> {
        self.distribution(ctl)?.cdf_eval(x)
    }

    /// P(Z̄_n ≤ 0) = 1/2 − Γ((n+1)/2)/(√π·Γ(n/2))·ρ·(1−ρ²)^{n/2}·₂F₁(1, (n+1)/2; 3/2; ρ²),
    /// which does not depend on σ_U or σ_V.
    pub fn prob_nonpositive(&self, ctl: &SeriesControl) -> Result<f64> {
        let rho = self.rho;
        if rho == 0.0 {
            return Ok(0.5);
        }
        let n = f64::from(self.n);
        let nu = 0.5 * (n - 1.0);
        let h = hyp2f1_one(nu, rho * rho, ctl)?;
        let ln_w = (1.0 - rho.abs()).ln() + (1.0 + rho.abs()).ln();
        let ln_mag = ln_gamma(0.5 * (n + 1.0)) - 0.5 * std::f64::consts::PI.ln() - ln_gamma(0.5 * n)
            + rho.abs().ln()
            + 0.5 * n * ln_w
            + h.value.ln();
        Ok(0.5 - rho.signum() * ln_mag.exp())
    }
}

/// P(UV ≤ 0) = 1/2 − arcsin(ρ)/π for a single product.
pub fn single_product_sign_prob(rho: f64) -> Result<f64> {
    if !(rho.abs() < 1.0) {
        return Err(Error::params(format!("require |rho| < 1, got rho={rho}")));
    }
    Ok(0.5 - rho.asin() / std::f64::consts::PI)
}
