//! Adaptive quadrature of the VG density, independent of every series path.
//!
//! Only the density (and through it K_ν) is evaluated here. Each side of μ
//! is integrated separately in the distance d = |x − μ|. On [0, 1/α] the
//! substitution d = s^p with p ≥ 1/(ν+1/2) turns the |d|^{2ν} behaviour at
//! the location into a bounded integrand. Beyond that, segments double in
//! length until the density falls below tol·e^{−40}.

use crate::error::{Error, Result};
use crate::quad;
use crate::series::{EvalResult, Method};
use crate::vg::{VarianceGamma, VgParams};

const MAX_SEGMENTS: usize = 4000;
const TRUNCATION_MARGIN: f64 = 40.0;

/// ∫ₐᵇ f(x) dx for the VG density f, with absolute error ≤ tol.
/// Either limit may be infinite.
pub fn integrate_pdf(p: &VgParams, a: f64, b: f64, tol: f64) -> Result<EvalResult> {
    if a.is_nan() || b.is_nan() || !(a <= b) {
        return Err(Error::domain(format!("integration limits must satisfy a <= b, got a={a}, b={b}")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let dist = VarianceGamma::new(*p);
    let mu = p.mu();
    let mut value = 0.0;
    let mut err = 0.0;
    let mut evaluations = 0;
    if b > mu {
        let r = integrate_side(&dist, 1.0, (a - mu).max(0.0), b - mu, 0.5 * tol)?;
        value += r.value;
        err += r.abs_err;
        evaluations += r.evaluations;
    }
    if a < mu {
        let r = integrate_side(&dist, -1.0, (mu - b).max(0.0), mu - a, 0.5 * tol)?;
        value += r.value;
        err += r.abs_err;
        evaluations += r.evaluations;
    }
    Ok(EvalResult::new(value, err, evaluations, Method::DensityQuadrature))
}

/// ∫ f(μ + sign·d) dd over lo ≤ d ≤ hi.
fn integrate_side(dist: &VarianceGamma, sign: f64, lo: f64, hi: f64, tol: f64) -> Result<quad::QuadResult> {
    let p = dist.params();
    let density = |d: f64| dist.pdf_at_offset(sign * d);
    let near_edge = 1.0 / p.alpha();
    let mut total = quad::QuadResult {
        value: 0.0,
        abs_err: 0.0,
        evaluations: 0,
    };
    let mut add = |r: quad::QuadResult| {
        total.value += r.value;
        total.abs_err += r.abs_err;
        total.evaluations += r.evaluations;
    };

    if lo < near_edge {
        let power = (1.0 / (p.nu() + 0.5)).ceil().max(2.0);
        let top = hi.min(near_edge);
        let s_lo = lo.powf(1.0 / power);
        let s_hi = top.powf(1.0 / power);
        let integrand = |s: f64| -> Result<f64> {
            if s == 0.0 {
                return Ok(0.0);
            }
            Ok(power * s.powf(power - 1.0) * density(s.powf(power))?)
        };
        add(quad::integrate(integrand, &[s_lo, s_hi], 0.25 * tol, 0.0, MAX_SEGMENTS)?);
    }

    if hi > near_edge {
        let start = lo.max(near_edge);
        let ln_cut = tol.ln() - TRUNCATION_MARGIN;
        let mut breakpoints = vec![start];
        let mut edge = start;
        loop {
            let next = (2.0 * edge).min(hi);
            breakpoints.push(next);
            edge = next;
            if edge >= hi {
                break;
            }
            let f = density(edge)?;
            if f == 0.0 || (f.ln() < ln_cut && density(1.01 * edge)? <= f) {
                break;
            }
        }
        add(quad::integrate(density, &breakpoints, 0.25 * tol, 0.0, MAX_SEGMENTS)?);
    }
    Ok(total)
}

/// P(X ≤ x) by quadrature: the left tail directly for x < μ, one minus the
/// right tail otherwise.
pub fn cdf_by_quadrature(p: &VgParams, x: f64, tol: f64) -> Result<EvalResult> {
    if !x.is_finite() {
        return Err(Error::domain(format!("cdf_by_quadrature requires finite x, got {x}")));
    }
    if x < p.mu() {
        integrate_pdf(p, f64::NEG_INFINITY, x, tol)
    } else {
        let r = integrate_pdf(p, x, f64::INFINITY, tol)?;
        Ok(EvalResult::new(1.0 - r.value, r.abs_err_est, r.terms_used, r.method))
    }
}
