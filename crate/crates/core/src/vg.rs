//! The variance-gamma law VG(ν, α, β, μ) with density
//!
//!   f(x) = M·e^{β(x−μ)}·|x−μ|^ν·K_ν(α|x−μ|),
//!   M = (α²−β²)^{ν+1/2} / (√π·(2α)^ν·Γ(ν+1/2)).
//!
//! Writing r = β/α, C = (1−r²)^{ν+1/2}/(2√π·Γ(ν+1/2)) and
//!
//!   c_k = (2r)^k/k! · Γ((k+1)/2)·Γ(ν+(k+1)/2),
//!
//! the distribution function is
//!
//!   F(x) = 1 − C·Σ_k c_k·G̃_{ν+k,ν}(α(x−μ))              for x ≥ μ,
//!   F(x) = C·Σ_k (−1)^k c_k·G̃_{ν+k,ν}(α(μ−x))           for x < μ,
//!   F(x) = F(μ) + C·Σ_k s^{k+1} c_k·G_{ν+k,ν}(α|x−μ|)    for all x, s = sgn(x−μ),
//!
//! where F(μ) = 1/2 − C·S₂ has a closed form through S₂ = Σ_{k odd} c_k. The
//! first two are what [`VarianceGamma::cdf`] evaluates; the third is kept as
//! an independent path for cross-checks.

use crate::error::{Error, Result};
use crate::kernels::{clamp_unit, KernelFamily, UpperKernelLadder};
use crate::series::{Diagnostics, EvalResult, Method, ScaledSum, SeriesControl};
use crate::special::{bessel_k, bessel_k_half_integer, hyp2f1_one, ln_gamma, modified_struve_l_scaled};

const LN_SQRT_PI: f64 = 0.572_364_942_924_700_1;

/// Tail masses whose Chernoff bound is below this log are zero in f64.
const LN_UNDERFLOW: f64 = -746.0;

/// Accuracy the quantile search aims for before accepting a weaker result.
const QUANTILE_TARGET: f64 = 1e-14;
/// Largest |cdf(x) − q| a returned quantile may have.
pub const QUANTILE_TOLERANCE: f64 = 1e-12;
const QUANTILE_MAX_ITER: usize = 200;

/// Shape ν, steepness α, skewness β and location μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VgParams {
    nu: f64,
    alpha: f64,
    beta: f64,
    mu: f64,
}

impl VgParams {
    /// Requires ν > −1/2 and 0 ≤ |β| < α, all finite.
    pub fn new(nu: f64, alpha: f64, beta: f64, mu: f64) -> Result<Self> {
        if ![nu, alpha, beta, mu].iter().all(|v| v.is_finite()) {
            return Err(Error::params("parameters must be finite"));
        }
        if !(nu > -0.5) {
            return Err(Error::params(format!("require nu > -1/2, got nu={nu}")));
        }
        if !(beta.abs() < alpha) {
            return Err(Error::params(format!(
                "require 0 <= |beta| < alpha, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(Self {
            nu,
            alpha,
            beta,
            mu,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Parameters of −X: (ν, α, −β, −μ).
    pub fn reflect(&self) -> Self {
        Self {
            beta: -self.beta,
            mu: -self.mu,
            ..*self
        }
    }

    /// β/α
    pub fn skew_ratio(&self) -> f64 {
        self.beta / self.alpha
    }

    /// ln(1 − β²/α²), formed from α ± |β| to keep digits near the boundary.
    fn ln_one_minus_r2(&self) -> f64 {
        let b = self.beta.abs();
        (self.alpha - b).ln() + (self.alpha + b).ln() - 2.0 * self.alpha.ln()
    }

    /// Chernoff bound on ln P(X − μ > d) for d > 0 (or on the left tail
    /// when `beta` is the reflected skewness).
    fn ln_tail_bound(&self, beta: f64, d: f64) -> f64 {
        let a = self.alpha;
        let room = a - beta;
        let ln_base = (a - beta.abs()).ln() + (a + beta.abs()).ln();
        (1..=40)
            .map(|j| {
                let t = room * (1.0 - 0.5f64.powi(j));
                let denom = ((a - beta - t) * (a + beta + t)).ln();
                -t * d + (self.nu + 0.5) * (ln_base - denom)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Which coefficients of the k-series a partial sum collects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// ln |c_k| for skew ratio r ≠ 0 (the sign is sgn(r)^k).
fn ln_coefficient(nu: f64, k: usize, ln_two_abs_r: f64) -> f64 {
    let kf = k as f64;
    let power = if k == 0 { 0.0 } else { kf * ln_two_abs_r };
    power - ln_gamma(kf + 1.0) + ln_gamma(0.5 * (kf + 1.0)) + ln_gamma(nu + 0.5 * (kf + 1.0))
}

fn coefficient_sign(r: f64, k: usize) -> f64 {
    if r < 0.0 && k % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// ln C = (ν+1/2)·ln(1−r²) − ln 2 − ln √π − ln Γ(ν+1/2).
fn ln_series_constant(nu: f64, ln_one_minus_r2: f64) -> f64 {
    (nu + 0.5) * ln_one_minus_r2 - std::f64::consts::LN_2 - LN_SQRT_PI - ln_gamma(nu + 0.5)
}

/// Σ over even or odd k of c_k = (2r)^k/k!·Γ((k+1)/2)·Γ(ν+(k+1)/2), summed
/// term by term.
pub fn coefficient_sum(nu: f64, ratio: f64, parity: Parity, ctl: &SeriesControl) -> Result<EvalResult> {
    check_ratio(nu, ratio)?;
    let start = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    if ratio == 0.0 {
        let v = if start == 0 { LN_SQRT_PI.exp() * ln_gamma(nu + 0.5).exp() } else { 0.0 };
        return Ok(EvalResult::new(v, 0.0, 1, Method::ClosedForm));
    }
    let ln_two_r = (2.0 * ratio.abs()).ln();
    let mut sum = ScaledSum::new(f64::NEG_INFINITY);
    let mut diagnostics = Diagnostics::default();
    let mut k = start;
    loop {
        if sum.terms() == ctl.max_terms {
            diagnostics.extended_series += 1;
        }
        if sum.terms() >= ctl.extended_terms() {
            return Err(Error::NonConvergence {
                series: "coefficient_sum",
                terms: sum.terms(),
            });
        }
        if sum.push(coefficient_sign(ratio, k), ln_coefficient(nu, k, ln_two_r), ctl) {
            break;
        }
        k += 2;
    }
    Ok(EvalResult::new(sum.value(), sum.error_estimate(), sum.terms(), Method::PowerSeries)
        .with_diagnostics(diagnostics))
}

/// Closed forms of the two coefficient sums:
///
///   even: √π·Γ(ν+1/2)·(1−r²)^{−(ν+1/2)},
///   odd:  2r·Γ(ν+1)·₂F₁(1, ν+1; 3/2; r²).
pub fn coefficient_sum_closed(nu: f64, ratio: f64, parity: Parity, ctl: &SeriesControl) -> Result<f64> {
    check_ratio(nu, ratio)?;
    match parity {
        Parity::Even => {
            let ln_w = (1.0 - ratio.abs()).ln() + (1.0 + ratio.abs()).ln();
            Ok((LN_SQRT_PI + ln_gamma(nu + 0.5) - (nu + 0.5) * ln_w).exp())
        }
        Parity::Odd => {
            let h = hyp2f1_one(nu, ratio * ratio, ctl)?;
            Ok(2.0 * ratio * ln_gamma(nu + 1.0).exp() * h.value)
        }
    }
}

fn check_ratio(nu: f64, ratio: f64) -> Result<()> {
    if !(nu > -0.5) || !nu.is_finite() || !(ratio.abs() < 1.0) {
        return Err(Error::domain(format!(
            "coefficient sums require nu > -1/2 and |ratio| < 1, got nu={nu}, ratio={ratio}"
        )));
    }
    Ok(())
}

/// Deliberate formula faults used to prove that the self-check notices them.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InjectedFault {
    /// Flip the sign of the odd coefficient sum in F(μ).
    NegateS2,
}

/// A VG distribution together with the series policy used to evaluate it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceGamma {
    params: VgParams,
    ctl: SeriesControl,
}

impl VarianceGamma {
    pub fn new(params: VgParams) -> Self {
        Self {
            params,
            ctl: SeriesControl::default(),
        }
    }

    pub fn with_control(params: VgParams, ctl: SeriesControl) -> Result<Self> {
        ctl.validate()?;
        Ok(Self { params, ctl })
    }

    pub fn params(&self) -> &VgParams {
        &self.params
    }

    pub fn control(&self) -> &SeriesControl {
        &self.ctl
    }

    fn ln_normalizing_constant(&self) -> f64 {
        let p = &self.params;
        let b = p.beta.abs();
        (p.nu + 0.5) * ((p.alpha - b).ln() + (p.alpha + b).ln())
            - LN_SQRT_PI
            - p.nu * (2.0 * p.alpha).ln()
            - ln_gamma(p.nu + 0.5)
    }

    /// M = (α²−β²)^{ν+1/2} / (√π·(2α)^ν·Γ(ν+1/2)).
    pub fn normalizing_constant(&self) -> f64 {
        self.ln_normalizing_constant().exp()
    }

    /// Density at x. At x = μ the density is the finite limit
    /// M·2^{ν−1}Γ(ν)/α^ν for ν > 0 and +∞ for ν ≤ 0.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::domain(format!("pdf requires finite x, got {x}")));
        }
        self.pdf_at_offset(x - self.params.mu)
    }

    /// Density at μ + d, for callers that know the offset more precisely
    /// than x itself.
    pub fn pdf_at_offset(&self, d: f64) -> Result<f64> {
        if !d.is_finite() {
            return Err(Error::domain(format!("pdf requires a finite offset, got {d}")));
        }
        let p = &self.params;
        let ln_m = self.ln_normalizing_constant();
        if d == 0.0 {
            if p.nu <= 0.0 {
                return Ok(f64::INFINITY);
            }
            let ln_limit = ln_m + (p.nu - 1.0) * std::f64::consts::LN_2 + ln_gamma(p.nu) - p.nu * p.alpha.ln();
            return Ok(ln_limit.exp());
        }
        let y = p.alpha * d.abs();
        let k_scaled = match half_integer_index(p.nu) {
            Some(m) => bessel_k_half_integer(m, y, true)?.value,
            None => bessel_k(p.nu, y, true)?.value,
        };
        let exponent = p.beta * d - y;
        Ok((ln_m + exponent + p.nu * d.abs().ln() + k_scaled.ln()).exp())
    }

    /// P(X ≤ μ) = 1/2 − C·S₂, i.e.
    /// 1/2 − Γ(ν+1)/(√π·Γ(ν+1/2))·r·(1−r²)^{ν+1/2}·₂F₁(1, ν+1; 3/2; r²).
    pub fn prob_at_most_location(&self) -> Result<f64> {
        self.location_value(None).map(|r| r.value)
    }

    fn location_value(&self, fault: Option<InjectedFault>) -> Result<EvalResult> {
        let p = &self.params;
        let r = p.skew_ratio();
        if r == 0.0 {
            return Ok(EvalResult::new(0.5, 0.0, 0, Method::ClosedForm));
        }
        let h = hyp2f1_one(p.nu, r * r, &self.ctl)?;
        let ln_mag = ln_gamma(p.nu + 1.0) - LN_SQRT_PI - ln_gamma(p.nu + 0.5)
            + r.abs().ln()
            + (p.nu + 0.5) * p.ln_one_minus_r2()
            + h.value.ln();
        let mut skew = r.signum() * ln_mag.exp();
        if fault == Some(InjectedFault::NegateS2) {
            skew = -skew;
        }
        let err = skew.abs() * (h.abs_err_est / h.value + 16.0 * f64::EPSILON * (1.0 + ln_mag.abs()));
        Ok(EvalResult::new(0.5 - skew, err, h.terms_used, Method::ClosedForm))
    }

    /// C·Σ_k sgn(r)^k·|c_k|·G̃_{ν+k,ν}(y) for skew ratio `r`; y = 0 means all
    /// kernels equal one.
    ///
    /// `ln_floor` is the log of the magnitude truncation is measured against
    /// when the sum is smaller than what the caller reports.
    fn tail_series(&self, r: f64, y: f64, ln_floor: f64) -> Result<EvalResult> {
        let nu = self.params.nu;
        let ctl = &self.ctl;
        let ln_c = ln_series_constant(nu, self.params.ln_one_minus_r2());
        let mut ladder = if y > 0.0 {
            Some(UpperKernelLadder::new(KernelFamily::new(nu, y, ctl)?))
        } else {
            None
        };
        let ln_two_r = if r == 0.0 { f64::NEG_INFINITY } else { (2.0 * r.abs()).ln() };
        let ln_coef_floor = ctl.rel_tol.ln() + ln_floor;
        let mut sum = ScaledSum::new(ln_floor);
        let mut diagnostics = Diagnostics::default();
        let mut max_rel = 0.0f64;
        let mut prev_coef = f64::INFINITY;
        let mut coef_run = 0;
        for k in 0.. {
            if k == ctl.max_terms {
                diagnostics.extended_series += 1;
            }
            if k >= ctl.extended_terms() {
                return Err(Error::NonConvergence {
                    series: "vg_tail_series",
                    terms: k,
                });
            }
            let ln_coef = ln_c + ln_coefficient(nu, k, ln_two_r);
            let ln_kernel = match ladder.as_mut() {
                Some(l) => {
                    let g = l.next()?;
                    diagnostics.merge(g.diagnostics);
                    max_rel = max_rel.max(g.rel_err);
                    g.ln_value
                }
                None => 0.0,
            };
            let done = sum.push(coefficient_sign(r, k), ln_coef + ln_kernel, ctl);
            if done || r == 0.0 {
                break;
            }
            // kernels never exceed one, so small decreasing coefficients bound the rest
            if ln_coef <= ln_coef_floor && ln_coef <= prev_coef {
                coef_run += 1;
                if coef_run >= 2 {
                    break;
                }
            } else {
                coef_run = 0;
            }
            prev_coef = ln_coef;
        }
        let err = sum.error_estimate() + max_rel * sum.abs_sum();
        Ok(EvalResult::new(sum.value(), err, sum.terms(), Method::RightTailSeries)
            .with_diagnostics(diagnostics))
    }

    fn finish(
        &self,
        value: f64,
        err: f64,
        terms: usize,
        method: Method,
        mut diagnostics: Diagnostics,
    ) -> Result<EvalResult> {
        let value = clamp_unit(value, "cdf", &mut diagnostics)?;
        Ok(EvalResult::new(value, err, terms, method).with_diagnostics(diagnostics))
    }

    /// P(X ≤ x) with error estimate and evaluation details.
    pub fn cdf_eval(&self, x: f64) -> Result<EvalResult> {
        if x.is_nan() {
            return Err(Error::domain("cdf requires a number, got NaN"));
        }
        let p = &self.params;
        if x == f64::NEG_INFINITY {
            return Ok(EvalResult::new(0.0, 0.0, 0, Method::ClosedForm));
        }
        if x == f64::INFINITY {
            return Ok(EvalResult::new(1.0, 0.0, 0, Method::ClosedForm));
        }
        let d = x - p.mu;
        if d == 0.0 {
            return self.location_value(None);
        }
        let y = p.alpha * d.abs();
        if d > 0.0 {
            if p.ln_tail_bound(p.beta, d) < LN_UNDERFLOW {
                return Ok(EvalResult::new(1.0, 0.0, 0, Method::ClosedForm));
            }
            let s = self.tail_series(p.skew_ratio(), y, f64::NEG_INFINITY)?;
            self.finish(1.0 - s.value, s.abs_err_est, s.terms_used, Method::RightTailSeries, s.diagnostics)
        } else {
            if p.ln_tail_bound(-p.beta, -d) < LN_UNDERFLOW {
                return Ok(EvalResult::new(0.0, 0.0, 0, Method::ClosedForm));
            }
            let s = self.tail_series(-p.skew_ratio(), y, f64::NEG_INFINITY)?;
            self.finish(s.value, s.abs_err_est, s.terms_used, Method::LeftTailSeries, s.diagnostics)
        }
    }

    /// P(X ≤ x).
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.cdf_eval(x).map(|r| r.value)
    }

    /// P(X > x), summed directly from the upper kernels for x ≥ μ.
    ///
    /// Relative accuracy in the right tail holds when β ≥ 0 (all terms
    /// positive); for β < 0 the terms alternate and accuracy is absolute.
    pub fn survival_eval(&self, x: f64) -> Result<EvalResult> {
        if x.is_nan() {
            return Err(Error::domain("survival requires a number, got NaN"));
        }
        let p = &self.params;
        let d = x - p.mu;
        if d <= 0.0 {
            let c = if d == 0.0 { self.location_value(None)? } else { self.cdf_eval(x)? };
            return self.finish(1.0 - c.value, c.abs_err_est, c.terms_used, Method::Complement, c.diagnostics);
        }
        if x == f64::INFINITY || p.ln_tail_bound(p.beta, d) < LN_UNDERFLOW {
            return Ok(EvalResult::new(0.0, 0.0, 0, Method::ClosedForm));
        }
        let s = self.tail_series(p.skew_ratio(), p.alpha * d, f64::NEG_INFINITY)?;
        self.finish(s.value, s.abs_err_est, s.terms_used, Method::RightTailSeries, s.diagnostics)
    }

    pub fn survival(&self, x: f64) -> Result<f64> {
        self.survival_eval(x).map(|r| r.value)
    }

    /// The right-hand and left-hand series evaluated at zero distance from μ
    /// (every kernel equal to one). Both should reproduce
    /// [`Self::prob_at_most_location`].
    pub fn location_series_values(&self) -> Result<(f64, f64)> {
        let r = self.params.skew_ratio();
        let right = 1.0 - self.tail_series(r, 0.0, 0.0)?.value;
        let left = self.tail_series(-r, 0.0, f64::NEG_INFINITY)?.value;
        Ok((right, left))
    }

    /// P(X ≤ x) from the single series valid on both sides of μ.
    pub fn cdf_eq3(&self, x: f64) -> Result<f64> {
        self.cdf_eq3_eval(x, None).map(|r| r.value)
    }

    #[doc(hidden)]
    pub fn cdf_eq3_eval(&self, x: f64, fault: Option<InjectedFault>) -> Result<EvalResult> {
        if !x.is_finite() {
            return Err(Error::domain(format!("cdf_eq3 requires finite x, got {x}")));
        }
        let p = &self.params;
        let ctl = &self.ctl;
        let base = self.location_value(fault)?;
        let d = x - p.mu;
        if d == 0.0 {
            return Ok(base);
        }
        let s = d.signum();
        let r = p.skew_ratio();
        let y = p.alpha * d.abs();
        let family = KernelFamily::new(p.nu, y, ctl)?;
        let ln_c = ln_series_constant(p.nu, p.ln_one_minus_r2());
        let ln_two_r = if r == 0.0 { f64::NEG_INFINITY } else { (2.0 * r.abs()).ln() };
        let ln_coef_floor = ctl.rel_tol.ln();
        let mut sum = ScaledSum::new(0.0);
        let mut diagnostics = base.diagnostics;
        let mut max_rel = 0.0f64;
        let mut prev_coef = f64::INFINITY;
        let mut coef_run = 0;
        for k in 0.. {
            if k == ctl.max_terms {
                diagnostics.extended_series += 1;
            }
            if k >= ctl.extended_terms() {
                return Err(Error::NonConvergence {
                    series: "vg_signed_kernel_series",
                    terms: k,
                });
            }
            let ln_coef = ln_c + ln_coefficient(p.nu, k, ln_two_r);
            let g = family.ln_lower(p.nu + k as f64)?;
            diagnostics.merge(g.diagnostics);
            max_rel = max_rel.max(g.rel_err);
            let sign = coefficient_sign(r, k) * if k % 2 == 0 { s } else { 1.0 };
            let done = sum.push(sign, ln_coef + g.ln_value, ctl);
            if done || r == 0.0 {
                break;
            }
            if ln_coef <= ln_coef_floor && ln_coef <= prev_coef {
                coef_run += 1;
                if coef_run >= 2 {
                    break;
                }
            } else {
                coef_run = 0;
            }
            prev_coef = ln_coef;
        }
        let err = base.abs_err_est + sum.error_estimate() + max_rel * sum.abs_sum();
        self.finish(
            base.value + sum.value(),
            err,
            sum.terms(),
            Method::SignedKernelSeries,
            diagnostics,
        )
    }

    /// For β = 0:
    /// F(x) = 1/2 + (α(x−μ)/2)·[K_ν·L_{ν−1} + L_ν·K_{ν−1}](α|x−μ|).
    pub fn cdf_symmetric(&self, x: f64) -> Result<f64> {
        self.cdf_symmetric_eval(x).map(|r| r.value)
    }

    pub fn cdf_symmetric_eval(&self, x: f64) -> Result<EvalResult> {
        let p = &self.params;
        if p.beta != 0.0 {
            return Err(Error::params(format!(
                "the symmetric formula requires beta = 0, got beta={}",
                p.beta
            )));
        }
        if !x.is_finite() {
            return Err(Error::domain(format!("cdf_symmetric requires finite x, got {x}")));
        }
        let d = x - p.mu;
        if d == 0.0 {
            return Ok(EvalResult::new(0.5, 0.0, 0, Method::ClosedForm));
        }
        let y = p.alpha * d.abs();
        let k_nu = bessel_k(p.nu, y, true)?.value;
        let k_nu_m1 = bessel_k(p.nu - 1.0, y, true)?.value;
        let l_nu = modified_struve_l_scaled(p.nu, y, &self.ctl)?;
        let l_nu_m1 = modified_struve_l_scaled(p.nu - 1.0, y, &self.ctl)?;
        let g = y * (k_nu * l_nu_m1.value + l_nu.value * k_nu_m1);
        let err = 16.0 * f64::EPSILON * g
            + y * (k_nu * l_nu_m1.abs_err_est + k_nu_m1 * l_nu.abs_err_est);
        self.finish(
            0.5 + 0.5 * d.signum() * g,
            0.5 * err,
            l_nu.terms_used + l_nu_m1.terms_used,
            Method::StruveFormula,
            Diagnostics::default(),
        )
    }

    /// The x with cdf(x) = q, to |cdf(x) − q| ≤ 1e-12.
    ///
    /// Where the distribution function is too steep for that to be
    /// representable (a density pole at μ) the best floating-point neighbour
    /// is returned.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!("quantile requires 0 < q < 1, got {q}")));
        }
        let p = &self.params;
        let f = |x: f64| -> Result<f64> { Ok(self.cdf(x)? - q) };
        if (self.prob_at_most_location()? - q).abs() <= QUANTILE_TARGET {
            return Ok(p.mu);
        }
        let step = (1.0 + p.nu.abs()) / (p.alpha - p.beta.abs());

        let mut lo = p.mu - step;
        let mut f_lo = f(lo)?;
        let mut width = step;
        let mut expansions = 0;
        while f_lo > 0.0 {
            width *= 2.0;
            lo = p.mu - width;
            f_lo = f(lo)?;
            expansions += 1;
            if expansions > 1100 {
                return Err(Error::RootNotFound(expansions));
            }
        }
        let mut hi = p.mu + step;
        let mut f_hi = f(hi)?;
        width = step;
        while f_hi < 0.0 {
            width *= 2.0;
            hi = p.mu + width;
            f_hi = f(hi)?;
            expansions += 1;
            if expansions > 1100 {
                return Err(Error::RootNotFound(expansions));
            }
        }
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }

        let (mut a, mut fa, mut b, mut fb) = (lo, f_lo, hi, f_hi);
        let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
        let mut bisect = false;
        let mut last_side = 0i8;
        let mut collapsed = false;
        for _ in 0..QUANTILE_MAX_ITER {
            let width = b - a;
            let mut x = b - fb * (b - a) / (fb - fa);
            if bisect || !(x > a && x < b) {
                x = a + 0.5 * (b - a);
            }
            if !(x > a && x < b) {
                collapsed = true;
                break;
            }
            let fx = f(x)?;
            if fx.abs() < best.1.abs() {
                best = (x, fx);
            }
            if fx.abs() <= QUANTILE_TARGET {
                return Ok(x);
            }
            // Illinois: halve the retained end's value after two same-side steps
            if fx < 0.0 {
                a = x;
                fa = fx;
                if last_side == -1 {
                    fb *= 0.5;
                }
                last_side = -1;
            } else {
                b = x;
                fb = fx;
                if last_side == 1 {
                    fa *= 0.5;
                }
                last_side = 1;
            }
            bisect = b - a > 0.5 * width;
        }
        if best.1.abs() <= QUANTILE_TOLERANCE || collapsed {
            Ok(best.0)
        } else {
            Err(Error::RootNotFound(QUANTILE_MAX_ITER))
        }
    }
}

fn half_integer_index(nu: f64) -> Option<u32> {
    let m = nu - 0.5;
    if m >= 0.0 && m.fract() == 0.0 && m <= 64.0 {
        Some(m as u32)
    } else {
        None
    }
}
