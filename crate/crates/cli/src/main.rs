use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use vgcdf::selfcheck::{self, Grid, SelfCheckOptions, TABLE1_BETAS, TABLE1_NUS};
use vgcdf::vg::InjectedFault;
use vgcdf::{Diagnostics, Error, EvalResult, Method, ProductNormalParams, SeriesControl, VarianceGamma, VgParams};

const EXIT_SELFCHECK: u8 = 1;
const EXIT_PARAMS: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(name = "vgcdf", version, about = "Variance-gamma distribution functions")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// P(X <= x)
    Cdf(CdfArgs),
    /// Density at x
    Pdf(PdfArgs),
    /// x with P(X <= x) = q
    Quantile(QuantileArgs),
    /// P(Y <= 0) for Y ~ VG(nu, 1, beta, 0) over the standard grid
    Table1(Table1Args),
    /// Mean of n products of correlated zero-mean normals
    Prodnormal(ProdNormalArgs),
    /// Compare independent evaluation routes and report deviations
    Selfcheck(SelfCheckArgs),
}

#[derive(Args)]
struct VgArgs {
    #[arg(long, allow_negative_numbers = true)]
    nu: f64,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
}

impl VgArgs {
    fn params(&self) -> Result<VgParams, Error> {
        VgParams::new(self.nu, self.alpha, self.beta, self.mu)
    }
}

#[derive(Args)]
struct Output {
    /// Emit one JSON record per line
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CdfArgs {
    #[command(flatten)]
    vg: VgArgs,
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    #[arg(long, value_enum, default_value_t = Formula::Auto)]
    formula: Formula,
    /// Relative truncation tolerance of the series
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Formula {
    Auto,
    Eq1eq2,
    Eq3,
    Symmetric,
}

#[derive(Args)]
struct PdfArgs {
    #[command(flatten)]
    vg: VgArgs,
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct QuantileArgs {
    #[command(flatten)]
    vg: VgArgs,
    #[arg(long)]
    q: f64,
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct Table1Args {
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["x", "prob_nonpositive"])))]
struct ProdNormalArgs {
    #[arg(long, allow_negative_numbers = true)]
    rho: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_u: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_v: f64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    n: i64,
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    #[arg(long)]
    prob_nonpositive: bool,
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Small,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    NegateS2,
}

#[derive(Args)]
struct SelfCheckArgs {
    #[arg(long, value_enum, default_value_t = GridArg::Small)]
    grid: GridArg,
    /// Absolute tolerance of the quadrature oracle
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
    #[command(flatten)]
    out: Output,
}

#[derive(Serialize)]
struct ValueRecord {
    value: f64,
    abs_err_est: f64,
    terms_used: usize,
    method: &'static str,
}

#[derive(Serialize)]
struct FamilyRecord {
    family: &'static str,
    max_abs_dev: f64,
    threshold: f64,
    pass: bool,
}

enum Failure {
    Library(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_PARAMS,
            Failure::Library(Error::Domain(_) | Error::InvalidParameters(_)) => EXIT_PARAMS,
            Failure::Library(_) => EXIT_CONVERGENCE,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Library(e) => e.to_string(),
        }
    }
}

/// Rounds to `digits` significant digits (ties to even) and drops trailing
/// zeros. Plain notation for exponents in [-5, 15), scientific otherwise.
fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".to_string() } else { v.to_string() };
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn series_control(tol: Option<f64>) -> Result<SeriesControl, Failure> {
    let mut ctl = SeriesControl::default();
    if let Ok(raw) = std::env::var("VG_SERIES_MAX_TERMS") {
        ctl.max_terms = raw
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("VG_SERIES_MAX_TERMS must be a positive integer, got {raw:?}")))?;
    }
    if let Some(t) = tol {
        ctl.rel_tol = t;
    }
    ctl.validate()?;
    Ok(ctl)
}

fn warn(d: Diagnostics) {
    if d.extended_series > 0 {
        eprintln!("warning: series ran past max_terms and was extended");
    }
    if d.clamped > 0 {
        eprintln!("warning: {} value(s) clamped into [0, 1] from rounding noise", d.clamped);
    }
}

fn emit(r: &EvalResult, json: bool) {
    warn(r.diagnostics);
    if json {
        let rec = ValueRecord {
            value: r.value,
            abs_err_est: r.abs_err_est,
            terms_used: r.terms_used,
            method: r.method.as_str(),
        };
        println!("{}", serde_json::to_string(&rec).expect("record serializes"));
    } else {
        println!("{}", format_sig(r.value, 10));
    }
}

fn cmd_cdf(a: &CdfArgs) -> Result<u8, Failure> {
    let ctl = series_control(a.tol)?;
    let d = VarianceGamma::with_control(a.vg.params()?, ctl)?;
    let r = match a.formula {
        Formula::Auto | Formula::Eq1eq2 => d.cdf_eval(a.x)?,
        Formula::Eq3 => d.cdf_eq3_eval(a.x, None)?,
        Formula::Symmetric => d.cdf_symmetric_eval(a.x)?,
    };
    emit(&r, a.out.json);
    Ok(0)
}

fn cmd_pdf(a: &PdfArgs) -> Result<u8, Failure> {
    let d = VarianceGamma::new(a.vg.params()?);
    let v = d.pdf(a.x)?;
    emit(&EvalResult::new(v, 0.0, 0, Method::ClosedForm), a.out.json);
    Ok(0)
}

fn cmd_quantile(a: &QuantileArgs) -> Result<u8, Failure> {
    let ctl = series_control(a.tol)?;
    let d = VarianceGamma::with_control(a.vg.params()?, ctl)?;
    let x = d.quantile(a.q)?;
    let residual = (d.cdf(x)? - a.q).abs();
    emit(&EvalResult::new(x, residual, 0, Method::RootFinding), a.out.json);
    Ok(0)
}

fn cmd_table1(a: &Table1Args) -> Result<u8, Failure> {
    let rows = selfcheck::table1(&series_control(None)?)?;
    if a.csv {
        let header: Vec<String> = TABLE1_NUS.iter().map(|nu| format!("nu_{nu}")).collect();
        println!("beta,{}", header.join(","));
        for (beta, row) in TABLE1_BETAS.iter().zip(&rows) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
            println!("{beta},{}", cells.join(","));
        }
    } else {
        print!("{:>6}", "beta");
        for nu in TABLE1_NUS {
            print!("  {:>8}", format!("nu={nu}"));
        }
        println!();
        for (beta, row) in TABLE1_BETAS.iter().zip(&rows) {
            print!("{beta:>6}");
            for v in row {
                print!("  {v:>8.4}");
            }
            println!();
        }
    }
    Ok(0)
}

fn cmd_prodnormal(a: &ProdNormalArgs) -> Result<u8, Failure> {
    let n = u32::try_from(a.n)
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Failure::Usage(format!("require n >= 1, got n={}", a.n)))?;
    let p = ProductNormalParams::new(a.sigma_u, a.sigma_v, a.rho, n)?;
    let ctl = series_control(a.tol)?;
    let r = match a.x {
        Some(x) => p.mean_product_cdf(x, &ctl)?,
        None => EvalResult::new(p.prob_nonpositive(&ctl)?, 0.0, 0, Method::ClosedForm),
    };
    emit(&r, a.out.json);
    Ok(0)
}

fn cmd_selfcheck(a: &SelfCheckArgs) -> Result<u8, Failure> {
    let mut opts = SelfCheckOptions {
        grid: match a.grid {
            GridArg::Small => Grid::Small,
            GridArg::Full => Grid::Full,
        },
        fault: a.inject_fault.map(|FaultArg::NegateS2| InjectedFault::NegateS2),
        ..SelfCheckOptions::default()
    };
    if let Some(t) = a.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Usage(format!("--tol must be positive, got {t}")));
        }
        opts.oracle_tol = t;
    }
    let reports = selfcheck::run(&opts, &series_control(None)?);
    for r in &reports {
        if a.out.json {
            let rec = FamilyRecord {
                family: r.family,
                max_abs_dev: r.max_abs_dev,
                threshold: r.threshold,
                pass: r.pass,
            };
            println!("{}", serde_json::to_string(&rec).expect("record serializes"));
        } else {
            println!(
                "{} {:<20} max_abs_dev={:.3e} threshold={:e} points={} errors={}",
                if r.pass { "PASS" } else { "FAIL" },
                r.family,
                r.max_abs_dev,
                r.threshold,
                r.points,
                r.errors
            );
        }
    }
    Ok(if reports.iter().all(|r| r.pass) { 0 } else { EXIT_SELFCHECK })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Cdf(a) => cmd_cdf(a),
        Command::Pdf(a) => cmd_pdf(a),
        Command::Quantile(a) => cmd_quantile(a),
        Command::Table1(a) => cmd_table1(a),
        Command::Prodnormal(a) => cmd_prodnormal(a),
        Command::Selfcheck(a) => cmd_selfcheck(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
