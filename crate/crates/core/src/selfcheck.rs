//! Built-in verification: each family compares two independent routes to
//! the same quantity and reports the largest deviation seen.

use crate::error::Result;
use crate::kernels::{g_lower, g_upper, KernelArgs};
use crate::oracle::cdf_by_quadrature;
use crate::product_normal::{single_product_sign_prob, ProductNormalParams};
use crate::series::SeriesControl;
use crate::vg::{coefficient_sum, coefficient_sum_closed, InjectedFault, Parity, VarianceGamma, VgParams};

/// β values of the P(Y ≤ 0) table, Y ∼ VG(ν, 1, β, 0).
pub const TABLE1_BETAS: [f64; 5] = [0.05, 0.1, 0.25, 0.5, 0.75];
/// ν values of the P(Y ≤ 0) table.
pub const TABLE1_NUS: [f64; 7] = [-0.25, 0.0, 0.5, 1.0, 2.0, 3.0, 5.0];
/// Published four-decimal values of P(Y ≤ 0), rows by β, columns by ν.
pub const TABLE1_REFERENCE: [[f64; 7]; 5] = [
    [0.4905, 0.4841, 0.4750, 0.4682, 0.4576, 0.4492, 0.4356],
    [0.4809, 0.4681, 0.4500, 0.4364, 0.4155, 0.3990, 0.3726],
    [0.4516, 0.4196, 0.3750, 0.3425, 0.2944, 0.2582, 0.2050],
    [0.3978, 0.3333, 0.2500, 0.1955, 0.1266, 0.0852, 0.0409],
    [0.3271, 0.2301, 0.1250, 0.0721, 0.0261, 0.0100, 0.0016],
];

/// P(Y ≤ 0) over [`TABLE1_BETAS`] × [`TABLE1_NUS`], unrounded.
pub fn table1(ctl: &SeriesControl) -> Result<Vec<Vec<f64>>> {
    TABLE1_BETAS
        .iter()
        .map(|&beta| {
            TABLE1_NUS
                .iter()
                .map(|&nu| VarianceGamma::with_control(VgParams::new(nu, 1.0, beta, 0.0)?, *ctl)?.cdf(0.0))
                .collect()
        })
        .collect()
}

/// Parameter grid for the distribution-level families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    Small,
    Full,
}

impl Grid {
    fn nus(self) -> &'static [f64] {
        match self {
            Grid::Small => &[-0.25, 0.5, 2.0],
            Grid::Full => &[-0.25, 0.0, 0.5, 1.0, 2.0, 3.0, 5.0],
        }
    }

    fn skew_ratios(self) -> &'static [f64] {
        match self {
            Grid::Small => &[0.0, -0.5, 0.5],
            Grid::Full => &[0.0, 0.05, -0.05, 0.25, -0.25, 0.5, -0.5, 0.75, -0.75],
        }
    }

    fn alphas(self) -> &'static [f64] {
        match self {
            Grid::Small => &[1.0],
            Grid::Full => &[0.5, 1.0, 3.0],
        }
    }

    fn offsets(self) -> &'static [f64] {
        match self {
            Grid::Small => &[-2.0, -0.1, 0.1, 2.0],
            Grid::Full => &[-10.0, -2.0, -0.1, 0.0, 0.1, 2.0, 10.0],
        }
    }

    /// Every (params, x) point of the grid, location fixed at 0.
    pub fn points(self) -> Vec<(VgParams, f64)> {
        let mut out = Vec::new();
        for &nu in self.nus() {
            for &r in self.skew_ratios() {
                for &alpha in self.alphas() {
                    let p = VgParams::new(nu, alpha, r * alpha, 0.0).expect("grid parameters are valid");
                    for &x in self.offsets() {
                        out.push((p, x));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SelfCheckOptions {
    pub grid: Grid,
    /// Absolute tolerance handed to the quadrature oracle.
    pub oracle_tol: f64,
    pub fault: Option<InjectedFault>,
}

impl Default for SelfCheckOptions {
    fn default() -> Self {
        Self {
            grid: Grid::Small,
            oracle_tol: 1e-11,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReport {
    pub family: &'static str,
    /// Largest deviation observed; relative for the families whose
    /// reference values span many orders of magnitude.
    pub max_abs_dev: f64,
    pub threshold: f64,
    pub points: usize,
    /// Points where an evaluation returned an error.
    pub errors: usize,
    pub pass: bool,
}

struct Tracker {
    family: &'static str,
    threshold: f64,
    max_dev: f64,
    points: usize,
    errors: usize,
}

impl Tracker {
    fn new(family: &'static str, threshold: f64) -> Self {
        Self {
            family,
            threshold,
            max_dev: 0.0,
            points: 0,
            errors: 0,
        }
    }

    fn record(&mut self, dev: Result<f64>) {
        self.points += 1;
        match dev {
            Ok(d) if d.is_finite() => self.max_dev = self.max_dev.max(d),
            _ => self.errors += 1,
        }
    }

    fn finish(self) -> FamilyReport {
        FamilyReport {
            family: self.family,
            max_abs_dev: self.max_dev,
            threshold: self.threshold,
            points: self.points,
            errors: self.errors,
            pass: self.errors == 0 && self.max_dev <= self.threshold,
        }
    }
}

fn rel_dev(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Runs every family in a fixed order.
pub fn run(opts: &SelfCheckOptions, ctl: &SeriesControl) -> Vec<FamilyReport> {
    let points = opts.grid.points();
    let dist = |p: &VgParams| VarianceGamma::with_control(*p, *ctl);
    let mut reports = Vec::new();

    let mut t = Tracker::new("table1", 5e-5);
    match table1(ctl) {
        Ok(rows) => {
            for (row, reference) in rows.iter().zip(TABLE1_REFERENCE.iter()) {
                for (v, r) in row.iter().zip(reference.iter()) {
                    t.record(Ok((v - r).abs()));
                }
            }
        }
        Err(e) => t.record(Err(e)),
    }
    reports.push(t.finish());

    let mut t = Tracker::new("oracle_equivalence", 1e-9);
    for (p, x) in &points {
        t.record((|| {
            let series = dist(p)?.cdf(*x)?;
            let quad = cdf_by_quadrature(p, *x, opts.oracle_tol)?.value;
            Ok((series - quad).abs())
        })());
    }
    reports.push(t.finish());

    let mut t = Tracker::new("eq1eq2_vs_eq3", 1e-12);
    for (p, x) in &points {
        t.record((|| {
            let d = dist(p)?;
            Ok((d.cdf(*x)? - d.cdf_eq3_eval(*x, opts.fault)?.value).abs())
        })());
    }
    reports.push(t.finish());

    let mut t = Tracker::new("eq3_vs_symmetric", 1e-12);
    for (p, x) in points.iter().filter(|(p, _)| p.beta() == 0.0) {
        t.record((|| {
            let d = dist(p)?;
            Ok((d.cdf_eq3_eval(*x, opts.fault)?.value - d.cdf_symmetric(*x)?).abs())
        })());
    }
    reports.push(t.finish());

    let mut t = Tracker::new("location_limits", 1e-12);
    for (p, _) in points.iter().filter(|(_, x)| *x == opts.grid.offsets()[0]) {
        t.record((|| {
            let d = dist(p)?;
            let f0 = d.prob_at_most_location()?;
            let (right, left) = d.location_series_values()?;
            Ok((right - f0).abs().max((left - f0).abs()))
        })());
    }
    reports.push(t.finish());

    let mut t = Tracker::new("closed_form_kernel", 1e-10);
    for &x in &[0.1, 1.0, 10.0, 40.0] {
        t.record((|| {
            let args = KernelArgs::new(0.5, 0.5, x)?;
            let lower = g_lower(&args, ctl)?.value;
            let upper = g_upper(&args, ctl)?.value;
            Ok(rel_dev(lower, -(-x).exp_m1()).max(rel_dev(upper, (-x).exp())))
        })());
    }
    reports.push(t.finish());

    let mut t = Tracker::new("proof_identities", 1e-12);
    for &nu in &[-0.25, 0.0, 1.0, 3.0] {
        for &r in &[0.1, 0.5, 0.9] {
            for parity in [Parity::Even, Parity::Odd] {
                t.record((|| {
                    let summed = coefficient_sum(nu, r, parity, ctl)?.value;
                    let closed = coefficient_sum_closed(nu, r, parity, ctl)?;
                    Ok(rel_dev(summed, closed))
                })());
            }
        }
    }
    reports.push(t.finish());

    let mut t = Tracker::new("product_normal", 1e-12);
    for &rho in &[-0.9, -0.5, -0.1, 0.0, 0.1, 0.5, 0.9] {
        t.record((|| {
            let p = ProductNormalParams::new(1.0, 1.0, rho, 1)?;
            Ok((p.prob_nonpositive(ctl)? - single_product_sign_prob(rho)?).abs())
        })());
    }
    let rho = 0.5;
    for &x in &[-4.0, -1.0, -0.3, -0.01, 0.0, 0.01, 0.3, 1.0, 4.0] {
        t.record((|| {
            let p = ProductNormalParams::new(1.0, 1.0, rho, 2)?;
            Ok((p.mean_product_cdf(x, ctl)?.value - mean_of_two_products_cdf(rho, x)).abs())
        })());
    }
    reports.push(t.finish());

    let mut t = Tracker::new("tail_accuracy", 1e-9);
    t.record((|| {
        let d = dist(&VgParams::new(0.5, 1.0, 0.0, 0.0)?)?;
        Ok(rel_dev(d.survival(40.0)?, 0.5 * (-40.0f64).exp()))
    })());
    reports.push(t.finish());

    reports
}

/// CDF of the mean of two products of standard normals with correlation ρ:
/// an asymmetric Laplace law with rates 2/(1+ρ) and 2/(1−ρ).
pub fn mean_of_two_products_cdf(rho: f64, x: f64) -> f64 {
    let left_rate = 2.0 / (1.0 - rho);
    let right_rate = 2.0 / (1.0 + rho);
    let p_left = (1.0 - rho) / 2.0;
    if x < 0.0 {
        p_left * (left_rate * x).exp()
    } else {
        1.0 - (1.0 - p_left) * (-right_rate * x).exp()
    }
}
