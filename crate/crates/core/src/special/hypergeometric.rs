//! ₂F₁(1, ν+1; 3/2; z) on 0 ≤ z < 1.

use crate::error::{Error, Result};
use crate::series::{EvalResult, Method, SeriesControl, SeriesSum};
use crate::special::ln_gamma;

/// Above this argument the power series is replaced by its expansion in 1 − z.
pub const LINEAR_TRANSFORM_THRESHOLD: f64 = 0.95;

/// Σ_j (b)_j/(c)_j · z^j, i.e. ₂F₁(1, b; c; z). Positive terms for b, c > 0.
fn unit_a_series(b: f64, c: f64, z: f64, ctl: &SeriesControl) -> Result<(f64, f64, usize)> {
    let mut sum = SeriesSum::new();
    let mut term = 1.0;
    let mut j = 0.0;
    while !sum.push(term, ctl) {
        if sum.terms() >= ctl.max_terms {
            return Err(Error::NonConvergence {
                series: "hyp2f1_one",
                terms: ctl.max_terms,
            });
        }
        term *= (b + j) / (c + j) * z;
        j += 1.0;
        if term == 0.0 {
            break;
        }
    }
    Ok((sum.value(), sum.error_estimate(), sum.terms()))
}

/// ₂F₁(1, ν+1; 3/2; z) for ν > −1/2 and 0 ≤ z < 1.
///
/// For z > 0.95 the connection formula in w = 1 − z is used:
///
///   F = −₂F₁(1, ν+1; ν+3/2; w)/(2ν+1)
///       + √π·Γ(ν+1/2)/(2Γ(ν+1)) · z^{−1/2}·w^{−ν−1/2},
///
/// which has no logarithmic special cases because c − a − b = −ν − 1/2
/// only enters through the finite ratio Γ(−ν−1/2)/Γ(1/2−ν). Accuracy
/// degrades like 1/(ν+1/2) as ν approaches −1/2.
pub fn hyp2f1_one(nu: f64, z: f64, ctl: &SeriesControl) -> Result<EvalResult> {
    if !(nu > -0.5) || !nu.is_finite() {
        return Err(Error::domain(format!("hyp2f1_one requires nu > -1/2, got {nu}")));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(Error::domain(format!("hyp2f1_one requires 0 <= z < 1, got {z}")));
    }
    if z <= LINEAR_TRANSFORM_THRESHOLD {
        let (v, err, terms) = unit_a_series(nu + 1.0, 1.5, z, ctl)?;
        return Ok(EvalResult::new(v, err, terms, Method::PowerSeries));
    }
    let w = 1.0 - z;
    let (regular, err, terms) = unit_a_series(nu + 1.0, nu + 1.5, w, ctl)?;
    let ln_singular = 0.5 * std::f64::consts::PI.ln() + ln_gamma(nu + 0.5)
        - std::f64::consts::LN_2
        - ln_gamma(nu + 1.0)
        - 0.5 * z.ln()
        - (nu + 0.5) * w.ln();
    let singular = ln_singular.exp();
    let regular_part = regular / (2.0 * nu + 1.0);
    let value = singular - regular_part;
    let abs_err = err / (2.0 * nu + 1.0)
        + 8.0 * f64::EPSILON * (singular.abs() + regular_part.abs() * (1.0 + ln_singular.abs()));
    Ok(EvalResult::new(value, abs_err, terms, Method::LinearTransformation))
}
