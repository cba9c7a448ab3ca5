//! Truncation policy and result records shared by every series and
//! quadrature routine in the crate.

use std::fmt;

use crate::error::{Error, Result};

/// Hard ceiling the k-series may be extended to when the soft `max_terms`
/// budget runs out (parameters close to |β| = α need thousands of terms).
pub const EXTENDED_MAX_TERMS: usize = 20_000;

/// Truncation and tolerance policy for infinite series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            max_terms: 2000,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, abs_tol: f64, max_terms: usize) -> Result<Self> {
        let ctl = Self {
            rel_tol,
            abs_tol,
            max_terms,
        };
        ctl.validate()?;
        Ok(ctl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::domain("series rel_tol must be positive"));
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::domain("series abs_tol must be nonnegative"));
        }
        if self.max_terms == 0 {
            return Err(Error::domain("series max_terms must be at least 1"));
        }
        Ok(())
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    /// Term budget for the k-series, which may exceed `max_terms`.
    pub(crate) fn extended_terms(&self) -> usize {
        self.max_terms.max(EXTENDED_MAX_TERMS)
    }
}

/// Which evaluation path produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Temme's series for K at small argument, then recurrence in order.
    BesselTemme,
    /// Steed's continued fraction for K at large argument, then recurrence.
    BesselSteed,
    /// Finite elementary sum for half-integer order.
    HalfInteger,
    /// Direct summation of a convergent power series.
    PowerSeries,
    /// Series in 1 − z after a linear transformation of ₂F₁.
    LinearTransformation,
    /// Lommel/Bessel product formula for the lower kernel.
    KernelProduct,
    /// One minus the lower kernel.
    Complement,
    /// Exp-scaled numerical quadrature of the tail integral.
    TailQuadrature,
    /// Upper kernels obtained by the upward recurrence in the first index.
    KernelRecurrence,
    /// Right-tail series of Bessel-kernel integrals (x ≥ location).
    RightTailSeries,
    /// Left-tail series of Bessel-kernel integrals (x < location).
    LeftTailSeries,
    /// Location constant plus signed lower-kernel series, valid for all x.
    SignedKernelSeries,
    /// Modified Struve function formula for the symmetric law.
    StruveFormula,
    /// Closed form (elementary functions only).
    ClosedForm,
    /// Adaptive Gauss–Kronrod integration of the density.
    DensityQuadrature,
    /// Bracketing plus bisection/secant root finding.
    RootFinding,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::BesselTemme => "bessel_temme",
            Method::BesselSteed => "bessel_steed",
            Method::HalfInteger => "half_integer",
            Method::PowerSeries => "power_series",
            Method::LinearTransformation => "linear_transformation",
            Method::KernelProduct => "kernel_product",
            Method::Complement => "complement",
            Method::TailQuadrature => "tail_quadrature",
            Method::KernelRecurrence => "kernel_recurrence",
            Method::RightTailSeries => "right_tail_series",
            Method::LeftTailSeries => "left_tail_series",
            Method::SignedKernelSeries => "signed_kernel_series",
            Method::StruveFormula => "struve_formula",
            Method::ClosedForm => "closed_form",
            Method::DensityQuadrature => "density_quadrature",
            Method::RootFinding => "root_finding",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Counters for conditions that did not stop the computation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Values pulled back into their valid range after rounding excursions.
    pub clamped: u32,
    /// Series that ran past `max_terms` into the extended budget.
    pub extended_series: u32,
}

impl Diagnostics {
    pub(crate) fn merge(&mut self, other: Diagnostics) {
        self.clamped += other.clamped;
        self.extended_series += other.extended_series;
    }
}

/// A computed value with a heuristic error estimate.
///
/// `abs_err_est` estimates truncation plus accumulated rounding under the
/// stopping rule in use. It is not a rigorous bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub abs_err_est: f64,
    pub terms_used: usize,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl EvalResult {
    pub fn new(value: f64, abs_err_est: f64, terms_used: usize, method: Method) -> Self {
        Self {
            value,
            abs_err_est,
            terms_used,
            method,
            diagnostics: Diagnostics::default(),
        }
    }

    pub(crate) fn with_diagnostics(mut self, diagnostics: Diagnostics) -> Self {
        self.diagnostics = diagnostics;
        self
    }
}

/// Compensated accumulator implementing the common stopping rule: the sum
/// has converged once two consecutive terms are non-increasing in magnitude
/// and below `rel_tol·|sum| + abs_tol`.
///
/// The non-increasing requirement keeps a run of underflowed or still-growing
/// leading terms from ending the sum before its bulk has been reached.
#[derive(Debug, Clone)]
pub(crate) struct SeriesSum {
    sum: f64,
    compensation: f64,
    abs_sum: f64,
    prev_mag: f64,
    last_mag: f64,
    small_run: u8,
    terms: usize,
}

impl SeriesSum {
    pub(crate) fn new() -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
            abs_sum: 0.0,
            prev_mag: f64::INFINITY,
            last_mag: 0.0,
            small_run: 0,
            terms: 0,
        }
    }

    /// Adds a term; returns true once the stopping rule has fired.
    pub(crate) fn push(&mut self, term: f64, ctl: &SeriesControl) -> bool {
        // Neumaier summation
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += term.abs();
        self.terms += 1;

        let mag = term.abs();
        let total = self.value().abs();
        let small = total > 0.0 && mag <= ctl.rel_tol * total + ctl.abs_tol;
        if small && mag <= self.prev_mag {
            self.small_run += 1;
        } else {
            self.small_run = 0;
        }
        self.prev_mag = mag;
        self.last_mag = mag;
        self.small_run >= 2
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    pub(crate) fn terms(&self) -> usize {
        self.terms
    }

    pub(crate) fn error_estimate(&self) -> f64 {
        2.0 * self.last_mag + 4.0 * f64::EPSILON * self.abs_sum
    }
}

/// ln(e^a + e^b)
pub(crate) fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Signed series whose terms arrive as (sign, ln|term|), held internally as
/// m·e^{scale} so that sums far below the f64 range still converge.
///
/// `ln_floor` sets a reference magnitude that the stopping rule measures
/// terms against when the sum itself may be much smaller than the quantity
/// the caller ultimately reports (for instance 1 − S).
#[derive(Debug, Clone)]
pub(crate) struct ScaledSum {
    scale: f64,
    sum: f64,
    compensation: f64,
    abs_sum: f64,
    prev_mag: f64,
    last_mag: f64,
    small_run: u8,
    terms: usize,
    ln_floor: f64,
}

impl ScaledSum {
    pub(crate) fn new(ln_floor: f64) -> Self {
        Self {
            scale: f64::NEG_INFINITY,
            sum: 0.0,
            compensation: 0.0,
            abs_sum: 0.0,
            prev_mag: f64::INFINITY,
            last_mag: 0.0,
            small_run: 0,
            terms: 0,
            ln_floor,
        }
    }

    fn rescale(&mut self, new_scale: f64) {
        if self.scale == f64::NEG_INFINITY {
            self.scale = new_scale;
            return;
        }
        let factor = (self.scale - new_scale).exp();
        self.sum *= factor;
        self.compensation *= factor;
        self.abs_sum *= factor;
        self.prev_mag *= factor;
        self.last_mag *= factor;
        self.scale = new_scale;
    }

    /// Adds sign·e^{ln_mag}; returns true once the stopping rule has fired.
    pub(crate) fn push(&mut self, sign: f64, ln_mag: f64, ctl: &SeriesControl) -> bool {
        self.terms += 1;
        if ln_mag == f64::NEG_INFINITY {
            // exact zero: counts as small once something has accumulated
            self.last_mag = 0.0;
            if self.scale > f64::NEG_INFINITY {
                self.small_run += 1;
            }
            self.prev_mag = 0.0;
            return self.small_run >= 2;
        }
        if ln_mag > self.scale {
            self.rescale(ln_mag);
        }
        let term = sign * (ln_mag - self.scale).exp();
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
        let mag = term.abs();
        self.abs_sum += mag;

        // cancellation leaves nothing meaningful below ε·Σ|terms|
        let reference = (self.sum + self.compensation)
            .abs()
            .max((self.ln_floor - self.scale).exp())
            .max(f64::EPSILON * self.abs_sum);
        let small = (reference > 0.0 && mag <= ctl.rel_tol * reference)
            || (ctl.abs_tol > 0.0 && ln_mag <= ctl.abs_tol.ln());
        if small && mag <= self.prev_mag {
            self.small_run += 1;
        } else {
            self.small_run = 0;
        }
        self.prev_mag = mag;
        self.last_mag = mag;
        self.small_run >= 2
    }

    pub(crate) fn terms(&self) -> usize {
        self.terms
    }

    pub(crate) fn value(&self) -> f64 {
        if self.scale == f64::NEG_INFINITY {
            return 0.0;
        }
        (self.sum + self.compensation) * self.scale.exp()
    }

    /// Σ|terms|, for propagating per-term relative errors.
    pub(crate) fn abs_sum(&self) -> f64 {
        if self.scale == f64::NEG_INFINITY {
            return 0.0;
        }
        self.abs_sum * self.scale.exp()
    }

    pub(crate) fn error_estimate(&self) -> f64 {
        if self.scale == f64::NEG_INFINITY {
            return 0.0;
        }
        (2.0 * self.last_mag + 4.0 * f64::EPSILON * self.abs_sum) * self.scale.exp()
    }
}
