//! Modified Bessel function of the second kind, K_ν(x), for real order.
//!
//! The order is split as ν = ν₀ + n with ν₀ ∈ [−1/2, 1/2). K_{ν₀} and
//! K_{ν₀+1} come from Temme's series when x ≤ 2 and from Steed's method
//! applied to the second continued fraction when x > 2; K_ν then follows by
//! forward recurrence, which is stable for K in increasing order.
//!
//! Everything is carried in the scaled form eˣ·K_ν(x) so that arguments up
//! to 1e4 (and beyond) stay representable.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::series::{EvalResult, Method};

/// Coefficients c₁…c₂₆ of 1/Γ(z) = Σ c_k z^k.
const RECIP_GAMMA_TAYLOR: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

const TEMME_MAX_ITER: usize = 500;
const STEED_MAX_ITER: usize = 10_000;

/// Temme's auxiliary gamma functions for |μ| ≤ 1/2:
/// g₁ = (1/Γ(1−μ) − 1/Γ(1+μ))/(2μ), g₂ = (1/Γ(1−μ) + 1/Γ(1+μ))/2,
/// together with 1/Γ(1+μ) and 1/Γ(1−μ).
///
/// With 1/Γ(1+z) = Σ_j c_{j+1} z^j, the even part gives g₂ and the odd part
/// gives g₁ without any cancellation at small μ.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mut even = 0.0;
    let mut odd = 0.0;
    // Horner in μ² over the even and odd coefficient subsequences
    let mu2 = mu * mu;
    for j in (0..RECIP_GAMMA_TAYLOR.len()).rev() {
        if j % 2 == 0 {
            even = even * mu2 + RECIP_GAMMA_TAYLOR[j];
        } else {
            odd = odd * mu2 + RECIP_GAMMA_TAYLOR[j];
        }
    }
    // even = Σ c_{2i+1} μ^{2i}, odd = Σ c_{2i+2} μ^{2i}
    let g2 = even;
    let g1 = -odd;
    let rg_plus = g2 - mu * g1; // 1/Γ(1+μ)
    let rg_minus = g2 + mu * g1; // 1/Γ(1−μ)
    (g1, g2, rg_plus, rg_minus)
}

/// Scaled K_μ and K_{μ+1} for |μ| ≤ 1/2 and 0 < x ≤ 2 by Temme's series.
fn scaled_pair_temme(mu: f64, x: f64) -> Result<(f64, f64, usize)> {
    let half_x = 0.5 * x;
    let ln_half_x = half_x.ln();
    let sigma = -mu * ln_half_x;
    let pi_mu = PI * mu;
    let sinrat = if pi_mu.abs() < f64::EPSILON {
        1.0
    } else {
        pi_mu / pi_mu.sin()
    };
    let sinhrat = if sigma.abs() < f64::EPSILON {
        1.0
    } else {
        sigma.sinh() / sigma
    };
    let (g1, g2, rg_plus, rg_minus) = temme_gammas(mu);
    let half_x_mu = (mu * ln_half_x).exp();

    let mut fk = sinrat * (sigma.cosh() * g1 - sinhrat * ln_half_x * g2);
    let mut pk = 0.5 / half_x_mu / rg_plus;
    let mut qk = 0.5 * half_x_mu / rg_minus;
    let mut ck = 1.0;
    let mut sum0 = fk;
    let mut sum1 = pk;
    let quarter_x2 = half_x * half_x;

    let mut k = 0;
    loop {
        k += 1;
        if k > TEMME_MAX_ITER {
            return Err(Error::NonConvergence {
                series: "bessel_k temme",
                terms: TEMME_MAX_ITER,
            });
        }
        let kf = k as f64;
        fk = (kf * fk + pk + qk) / (kf * kf - mu * mu);
        ck *= quarter_x2 / kf;
        pk /= kf - mu;
        qk /= kf + mu;
        let hk = -kf * fk + pk;
        let del0 = ck * fk;
        let del1 = ck * hk;
        sum0 += del0;
        sum1 += del1;
        if del0.abs() < 0.5 * f64::EPSILON * sum0.abs()
            && del1.abs() < 0.5 * f64::EPSILON * sum1.abs()
        {
            break;
        }
    }
    let ex = x.exp();
    Ok((sum0 * ex, sum1 * 2.0 / x * ex, k))
}

/// Scaled K_μ and K_{μ+1} for |μ| ≤ 1/2 and x > 2 by Steed's algorithm on
/// the second continued fraction.
fn scaled_pair_steed(mu: f64, x: f64) -> Result<(f64, f64, usize)> {
    let mut bi = 2.0 * (1.0 + x);
    let mut di = 1.0 / bi;
    let mut delhi = di;
    let mut hi = di;
    let mut qi = 0.0;
    let mut qip1 = 1.0;
    let mut ai = -(0.25 - mu * mu);
    let a1 = ai;
    let mut ci = -ai;
    let mut bqi = -ai;
    let mut s = 1.0 + bqi * delhi;

    let mut converged = false;
    let mut iters = 1;
    for i in 2..=STEED_MAX_ITER {
        iters = i;
        let fi = i as f64;
        ai -= 2.0 * (fi - 1.0);
        ci = -ai * ci / fi;
        let tmp = (qi - bi * qip1) / ai;
        qi = qip1;
        qip1 = tmp;
        bqi += ci * qip1;
        bi += 2.0;
        di = 1.0 / (bi + ai * di);
        delhi *= bi * di - 1.0;
        hi += delhi;
        let dels = bqi * delhi;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            series: "bessel_k steed",
            terms: STEED_MAX_ITER,
        });
    }
    hi *= -a1;
    let k_mu = (FRAC_PI_2 / x).sqrt() / s;
    let k_mu1 = k_mu * (mu + x + 0.5 - hi) / x;
    Ok((k_mu, k_mu1, iters))
}

/// eˣ·K_ν(x) for ν ≥ 0, x > 0, plus the terms used and the path taken.
fn scaled_nonneg_order(order: f64, x: f64) -> Result<(f64, usize, Method)> {
    let n_up = (order + 0.5).floor();
    let mu = order - n_up;
    let (k_mu, k_mu1, iters, method) = if x <= 2.0 {
        let (a, b, it) = scaled_pair_temme(mu, x)?;
        (a, b, it, Method::BesselTemme)
    } else {
        let (a, b, it) = scaled_pair_steed(mu, x)?;
        (a, b, it, Method::BesselSteed)
    };

    let n_up = n_up as usize;
    let mut k_prev = k_mu;
    let mut k_cur = k_mu1;
    for n in 1..=n_up {
        let k_next = 2.0 * (mu + n as f64) / x * k_cur + k_prev;
        k_prev = k_cur;
        k_cur = k_next;
    }
    Ok((k_prev, iters + n_up, method))
}

fn check_argument(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "K_nu(x) requires finite x > 0, got {x}"
        )));
    }
    Ok(())
}

/// K_ν(x), or eˣ·K_ν(x) when `scaled` is set.
///
/// Any real order is accepted (K_{−ν} = K_ν). The unscaled form returns
/// [`Error::Overflow`] when the result is not representable; the scaled form
/// stays finite for large x but can still overflow for tiny x at high order.
pub fn bessel_k(order: f64, x: f64, scaled: bool) -> Result<EvalResult> {
    check_argument(x)?;
    if !order.is_finite() {
        return Err(Error::domain("K_nu(x) requires a finite order"));
    }
    let (value, terms, method) = scaled_nonneg_order(order.abs(), x)?;
    if !value.is_finite() {
        return Err(Error::Overflow("bessel_k"));
    }
    let value = if scaled {
        value
    } else {
        // underflows to zero for very large x
        value * (-x).exp()
    };
    let err = value * (8.0 + terms as f64 * 0.5) * f64::EPSILON;
    Ok(EvalResult::new(value, err, terms, method))
}

/// eˣ·K_ν(x) as a plain float; errors as for [`bessel_k`].
pub(crate) fn bessel_k_scaled(order: f64, x: f64) -> Result<f64> {
    bessel_k(order, x, true).map(|r| r.value)
}

/// K_{m+1/2}(x) from the finite elementary sum
/// √(π/2x)·e^{−x}·Σ_{j=0}^{m} (m+j)!/((m−j)!·j!)·(2x)^{−j}.
pub fn bessel_k_half_integer(m: u32, x: f64, scaled: bool) -> Result<EvalResult> {
    check_argument(x)?;
    let inv_2x = 0.5 / x;
    let mut coeff = 1.0;
    let mut sum = 1.0;
    let mf = m as f64;
    for j in 0..m {
        let jf = j as f64;
        // a_{j+1}/a_j = (m+j+1)(m−j)/(j+1)
        coeff *= (mf + jf + 1.0) * (mf - jf) / (jf + 1.0) * inv_2x;
        sum += coeff;
    }
    let scaled_value = (FRAC_PI_2 / x).sqrt() * sum;
    if !scaled_value.is_finite() {
        return Err(Error::Overflow("bessel_k_half_integer"));
    }
    let value = if scaled {
        scaled_value
    } else {
        scaled_value * (-x).exp()
    };
    let err = value.abs() * (m as f64 + 2.0) * 2.0 * f64::EPSILON;
    Ok(EvalResult::new(value, err, m as usize + 1, Method::HalfInteger))
}
