//! Command-line front end.
//!
//! Every run echoes its effective configuration. Exit codes: 0 success,
//! 1 internal failure, 2 usage or precondition error, 3 for an honest
//! negative outcome (precision exhausted, stagnation) whose report is still
//! printed.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::artin_hasse::{self, AhForm, IntegralityReport};
use crate::ball::BallReal;
use crate::diophantine::{self, CfStop};
use crate::error::Error;
use crate::exact::{self, Rational};
use crate::lambert;
use crate::omega_real::{self, OmegaResult};
use crate::padic::PadicDigits;
use crate::padic_omega::{self, IterationTrace, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "omegalab",
    version,
    about = "Certified computations around the Omega constant"
)]
pub struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the report to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Real Omega constant to certified decimal digits.
    Omega(OmegaArgs),
    /// Lambert W series coefficients and evaluation.
    Lambert(LambertArgs),
    /// Artin-Hasse exponential coefficients and integrality.
    ArtinHasse(ArtinHasseArgs),
    /// p-adic Omega constant.
    PadicOmega(PadicOmegaArgs),
    /// Certified continued fraction of Omega with approximation statistics.
    Cf(CfArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaMethodArg {
    Iterate,
    Newton,
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct OmegaArgs {
    /// Certified decimal digits after the point.
    #[arg(long, default_value_t = 60)]
    pub digits: u32,
    #[arg(long, value_enum, default_value_t = OmegaMethodArg::Both)]
    pub method: OmegaMethodArg,
    /// Starting point NUM/DEN (default 1 for iterate, 1/2 for newton).
    #[arg(long)]
    pub x: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambertMethodArg {
    Series,
    Newton,
}

#[derive(Args, Debug, Clone)]
pub struct LambertArgs {
    /// Power k in W(x)^k.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Number of coefficients to list.
    #[arg(long, default_value_t = 10)]
    pub terms: usize,
    /// Evaluate at NUM/DEN.
    #[arg(long)]
    pub x: Option<String>,
    /// Decimal digits for the evaluation.
    #[arg(long, default_value_t = 40)]
    pub digits: u32,
    #[arg(long, value_enum, default_value_t = LambertMethodArg::Series)]
    pub method: LambertMethodArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AhMethodArg {
    ExpSum,
    Product,
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct ArtinHasseArgs {
    /// Prime p, or 1 for the product identity with exp(x).
    #[arg(long)]
    pub p: u64,
    /// Truncation order N.
    #[arg(long, default_value_t = 20)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = AhMethodArg::Both)]
    pub method: AhMethodArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PadicMethodArg {
    Series,
    Hensel,
    PaperIteration,
}

#[derive(Args, Debug, Clone)]
pub struct PadicOmegaArgs {
    #[arg(long)]
    pub p: u64,
    /// Precision N: the value is computed modulo p^N.
    #[arg(long, default_value_t = 20)]
    pub prec: u32,
    #[arg(long, value_enum, default_value_t = PadicMethodArg::Hensel)]
    pub method: PadicMethodArg,
    /// Step limit for `--method paper-iteration`.
    #[arg(long, default_value_t = 50)]
    pub max_steps: usize,
}

#[derive(Args, Debug, Clone)]
pub struct CfArgs {
    /// Digits of the Omega enclosure that is expanded.
    #[arg(long, default_value_t = 100)]
    pub digits: u32,
    /// Maximum number of partial quotients.
    #[arg(long, default_value_t = 1000)]
    pub terms: usize,
}

/// Effective configuration, echoed in every report.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub digits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prec: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_steps: Option<usize>,
    pub format: String,
}

impl RunConfig {
    fn new(sub: &str, json: bool) -> Self {
        RunConfig {
            subcommand: sub.into(),
            digits: None,
            prec: None,
            p: None,
            k: None,
            terms: None,
            method: None,
            x: None,
            order: None,
            max_steps: None,
            format: if json { "json" } else { "text" }.into(),
        }
    }

    fn echo(&self) -> String {
        let v = serde_json::to_value(self).unwrap();
        let fields: Vec<String> = v
            .as_object()
            .unwrap()
            .iter()
            .map(|(k, v)| {
                format!(
                    "{k}={}",
                    v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())
                )
            })
            .collect();
        format!("# config: {}\n", fields.join(" "))
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct OmegaRun {
    pub method: String,
    /// Decimal expansion, limited to certified digits.
    pub value: String,
    pub certified_digits: u32,
    pub iterations: usize,
    /// Upper bound on `|x e^x - 1|` at the returned center.
    pub residual_bound: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct OmegaReport {
    pub config: RunConfig,
    pub runs: Vec<OmegaRun>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub enclosures_overlap: Option<bool>,
    /// Upper bound on `|-ln Ω - Ω|`.
    pub minus_log_bound: String,
    pub abel_n_max: u32,
    /// Whether `(Ω e^Ω)^n` contains 1 for every `n <= abel_n_max`.
    pub abel_all_contain_one: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct LambertEval {
    pub x: String,
    pub method: String,
    pub value: String,
    pub certified_digits: u32,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct LambertReport {
    pub config: RunConfig,
    pub k: u32,
    /// Entry n is the coefficient of x^(n+k), as "num/den".
    pub coeffs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub evaluation: Option<LambertEval>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct AhSeriesReport {
    pub form: AhForm,
    pub coeffs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub integrality: Option<IntegralityReport>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ArtinHasseReport {
    pub config: RunConfig,
    pub p: u64,
    pub order: usize,
    pub series: Vec<AhSeriesReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub forms_agree: Option<bool>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PadicOmegaReport {
    pub config: RunConfig,
    pub p: u64,
    #[serde(rename = "precN")]
    pub prec_n: u32,
    pub method: String,
    /// `ok` for series and hensel; the iteration verdict otherwise.
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<PadicDigits>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub defect: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference: Option<PadicDigits>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fixed_point_check: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub iteration_trace: Option<IterationTrace>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CfRow {
    pub n: usize,
    pub a_n: String,
    pub p_n: String,
    pub q_n: String,
    /// Outward-rounded enclosure of `|Ω - p_n/q_n|`.
    pub delta: [String; 2],
    pub mu_eff: Option<f64>,
    pub r_n: Option<f64>,
    pub running_max_r: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CfReport {
    pub config: RunConfig,
    pub label: String,
    pub partial_quotients: Vec<String>,
    pub certified_terms: usize,
    pub stop: CfStop,
    pub rows: Vec<CfRow>,
}

/// A finished run: exit code plus the rendered report.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
}

fn usage(msg: impl Into<String>) -> Outcome {
    Outcome {
        code: EXIT_USAGE,
        text: format!("error: {}\n", msg.into()),
    }
}

fn failure(e: &Error) -> Outcome {
    let code = match e {
        Error::NotPrime(_) | Error::InvalidArgument(_) | Error::OutsideRadius | Error::BelowBranchPoint => EXIT_USAGE,
        Error::PrecisionExhausted(_) | Error::StagnationDetected(_) => EXIT_INCONCLUSIVE,
        _ => EXIT_FAILURE,
    };
    let msg = match e {
        Error::NotPrime(_) => "p must be prime".to_string(),
        other => other.to_string(),
    };
    Outcome {
        code,
        text: format!("error: {msg}\n"),
    }
}

fn render<T: Serialize>(json: bool, report: &T, text: String) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(report).unwrap();
        s.push('\n');
        s
    } else {
        text
    }
}

fn parse_x(s: &Option<String>) -> Result<Option<Rational>, Outcome> {
    match s {
        None => Ok(None),
        Some(v) => exact::parse_rational(v).map(Some).map_err(|e| usage(e.to_string())),
    }
}

/// Runs a parsed command and renders its report.
pub fn execute(cli: &Cli) -> Outcome {
    let r = match &cli.command {
        Command::Omega(a) => run_omega(a, cli.json),
        Command::Lambert(a) => run_lambert(a, cli.json),
        Command::ArtinHasse(a) => run_artin_hasse(a, cli.json),
        Command::PadicOmega(a) => run_padic_omega(a, cli.json),
        Command::Cf(a) => run_cf(a, cli.json),
    };
    r.unwrap_or_else(|o| o)
}

fn omega_run(method: &str, r: &OmegaResult, digits: u32) -> OmegaRun {
    OmegaRun {
        method: method.into(),
        value: r.value.to_decimal_string(digits),
        certified_digits: r.certified_digits,
        iterations: r.iterations,
        residual_bound: r.residual.upper_bound_string(3),
    }
}

fn run_omega(a: &OmegaArgs, json: bool) -> Result<Outcome, Outcome> {
    if a.digits == 0 {
        return Err(usage("--digits must be at least 1"));
    }
    let mut config = RunConfig::new("omega", json);
    config.digits = Some(a.digits);
    config.method = Some(format!("{:?}", a.method).to_lowercase());
    config.x = a.x.clone();
    let x0 = parse_x(&a.x)?;

    let mut results = Vec::new();
    if a.method != OmegaMethodArg::Newton {
        let r = omega_real::omega_iterate(a.digits, x0.as_ref()).map_err(|e| failure(&e))?;
        results.push(("iterate", r));
    }
    if a.method != OmegaMethodArg::Iterate {
        let r = omega_real::omega_newton(a.digits, x0.as_ref()).map_err(|e| failure(&e))?;
        results.push(("newton", r));
    }
    let runs: Vec<OmegaRun> = results.iter().map(|(m, r)| omega_run(m, r, a.digits)).collect();
    let overlap = (results.len() == 2).then(|| results[0].1.value.overlaps(&results[1].1.value));
    let omega = &results[0].1.value;
    let ml = omega_real::minus_log_check(omega).map_err(|e| failure(&e))?;
    const ABEL_N: u32 = 50;
    let abel_ok = omega_real::abel_check(omega, ABEL_N)
        .iter()
        .all(|b| b.contains_rational(&exact::int(1)));

    let report = OmegaReport {
        config: config.clone(),
        runs: runs.clone(),
        enclosures_overlap: overlap,
        minus_log_bound: ml.upper_bound_string(3),
        abel_n_max: ABEL_N,
        abel_all_contain_one: abel_ok,
    };
    let mut t = config.echo();
    for r in &runs {
        let _ = writeln!(t, "{}: {}", r.method, r.value);
        let _ = writeln!(
            t,
            "  certified digits {}, iterations {}, |x e^x - 1| <= {}",
            r.certified_digits, r.iterations, r.residual_bound
        );
    }
    if let Some(o) = overlap {
        let _ = writeln!(t, "enclosures overlap: {o}");
    }
    let _ = writeln!(t, "|-ln(omega) - omega| <= {}", report.minus_log_bound);
    let _ = writeln!(t, "(omega e^omega)^n contains 1 for n <= {ABEL_N}: {abel_ok}");
    Ok(Outcome {
        code: EXIT_OK,
        text: render(json, &report, t),
    })
}

fn run_lambert(a: &LambertArgs, json: bool) -> Result<Outcome, Outcome> {
    let mut config = RunConfig::new("lambert", json);
    config.k = Some(a.k);
    config.terms = Some(a.terms);
    config.x = a.x.clone();
    config.digits = Some(a.digits);
    config.method = Some(format!("{:?}", a.method).to_lowercase());
    let spec = lambert::w_series_coeffs(a.k, a.terms).map_err(|e| failure(&e))?;
    let coeffs: Vec<String> = spec
        .coeffs
        .iter()
        .map(|c| format!("{}/{}", c.numer(), c.denom()))
        .collect();
    let evaluation = match parse_x(&a.x)? {
        None => None,
        Some(x) => {
            let v = match a.method {
                LambertMethodArg::Series => lambert::w_eval_series(&x, a.k, a.digits),
                LambertMethodArg::Newton => {
                    let prec = crate::ball::digits_to_bits(a.digits as u64) + 64;
                    let xb = BallReal::from_rational(&x, prec + 32);
                    lambert::w_newton_real(&xb, a.digits + 10).map(|w| w.pow(a.k, prec))
                }
            }
            .map_err(|e| failure(&e))?;
            let d = v.certified_decimals(a.digits).unwrap_or(0);
            Some(LambertEval {
                x: exact::render(&x),
                method: format!("{:?}", a.method).to_lowercase(),
                value: v.to_decimal_string(a.digits),
                certified_digits: d,
            })
        }
    };
    let report = LambertReport {
        config: config.clone(),
        k: a.k,
        coeffs: coeffs.clone(),
        evaluation: evaluation.clone(),
    };
    let mut t = config.echo();
    let _ = writeln!(t, "W(x)^{} = {}", a.k, spec.to_series());
    if let Some(e) = &evaluation {
        let _ = writeln!(
            t,
            "W({})^{} = {} ({} certified digits, {})",
            e.x, a.k, e.value, e.certified_digits, e.method
        );
    }
    Ok(Outcome {
        code: EXIT_OK,
        text: render(json, &report, t),
    })
}

fn run_artin_hasse(a: &ArtinHasseArgs, json: bool) -> Result<Outcome, Outcome> {
    if a.p != 1 && !exact::is_prime(a.p) {
        return Err(usage("p must be prime"));
    }
    if a.order == 0 {
        return Err(usage("--order must be at least 1"));
    }
    let mut config = RunConfig::new("artin-hasse", json);
    config.p = Some(a.p);
    config.order = Some(a.order);
    config.method = Some(format!("{:?}", a.method).to_lowercase().replace("expsum", "exp-sum"));
    let mut forms = Vec::new();
    if a.method != AhMethodArg::Product {
        if a.p == 1 {
            return Err(usage(
                "the exp-sum form needs a prime p; use --method product with p = 1",
            ));
        }
        forms.push(artin_hasse::ah_exp_form(a.p, a.order).map_err(|e| failure(&e))?);
    }
    if a.method != AhMethodArg::ExpSum {
        forms.push(artin_hasse::ah_product_form(a.p, a.order).map_err(|e| failure(&e))?);
    }
    let agree = (forms.len() == 2).then(|| forms[0].series == forms[1].series);
    let series: Vec<AhSeriesReport> = forms
        .iter()
        .map(|s| AhSeriesReport {
            form: s.form,
            coeffs: s.series.to_fraction_strings(),
            integrality: (a.p != 1).then(|| s.integrality()),
        })
        .collect();
    let report = ArtinHasseReport {
        config: config.clone(),
        p: a.p,
        order: a.order,
        series: series.clone(),
        forms_agree: agree,
    };
    let mut t = config.echo();
    for (s, f) in series.iter().zip(&forms) {
        let name = match s.form {
            AhForm::ExpSum => "exp-sum",
            AhForm::Product => "product",
        };
        let _ = writeln!(t, "{name}: {}", f.series);
        if let Some(i) = &s.integrality {
            match i.first_failure {
                None => {
                    let _ = writeln!(t, "  {}-integral to order {}: pass", i.p, i.order);
                }
                Some(k) => {
                    let _ = writeln!(t, "  {}-integral to order {}: FAIL at index {k}", i.p, i.order);
                }
            }
        }
    }
    if let Some(g) = agree {
        let _ = writeln!(t, "forms agree: {g}");
    }
    let code = if series.iter().any(|s| s.integrality.as_ref().is_some_and(|i| !i.passed)) || agree == Some(false) {
        EXIT_FAILURE
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        code,
        text: render(json, &report, t),
    })
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Converged => "converged",
        Verdict::Stagnated => "stagnated",
        Verdict::PrecisionExhausted => "precision-exhausted",
        Verdict::LeftIntegers => "left-integers",
    }
}

fn run_padic_omega(a: &PadicOmegaArgs, json: bool) -> Result<Outcome, Outcome> {
    if !exact::is_prime(a.p) {
        return Err(usage("p must be prime"));
    }
    if a.prec < 2 {
        return Err(usage("--prec must be at least 2"));
    }
    let mut config = RunConfig::new("padic-omega", json);
    config.p = Some(a.p);
    config.prec = Some(a.prec);
    let method = match a.method {
        PadicMethodArg::Series => "series",
        PadicMethodArg::Hensel => "hensel",
        PadicMethodArg::PaperIteration => "paper-iteration",
    };
    config.method = Some(method.into());
    let mut t = config.echo();
    let (report, code) = match a.method {
        PadicMethodArg::Series | PadicMethodArg::Hensel => {
            let r = if a.method == PadicMethodArg::Series {
                padic_omega::omega_p_series(a.p, a.prec)
            } else {
                padic_omega::omega_p_hensel(a.p, a.prec)
            }
            .map_err(|e| failure(&e))?;
            let _ = writeln!(t, "omega_{} = {}", a.p, r.value);
            let _ = writeln!(t, "defect v(x E_p(x) - p) = {} (target {})", r.defect, a.prec);
            let rep = PadicOmegaReport {
                config: config.clone(),
                p: a.p,
                prec_n: a.prec,
                method: method.into(),
                outcome: "ok".into(),
                value: Some(r.value.to_digits()),
                defect: Some(r.defect),
                reference: None,
                fixed_point_check: None,
                iteration_trace: None,
            };
            (rep, EXIT_OK)
        }
        PadicMethodArg::PaperIteration => {
            config.max_steps = Some(a.max_steps);
            t = config.echo();
            if a.max_steps == 0 {
                return Err(usage("--max-steps must be at least 1"));
            }
            let out = padic_omega::run_paper_iteration(a.p, a.prec, a.max_steps).map_err(|e| failure(&e))?;
            let fixed = padic_omega::fixed_point_check(a.p, a.prec).map_err(|e| failure(&e))?;
            let converged = out.verdict == Verdict::Converged;
            let (value, defect) = if converged {
                let v = out.last.reduce_to(a.prec);
                let d = padic_omega::verify_defining_identity(a.p, &v).map_err(|e| failure(&e))?;
                (Some(v.to_digits()), Some(d))
            } else {
                (None, None)
            };
            let _ = writeln!(t, "reference (hensel) = {}", out.reference);
            let _ = writeln!(t, "fixed-point check (one step from the reference returns it): {fixed}");
            let _ = writeln!(t, "step  distance  precision  denominator_valuation");
            for s in &out.trace.steps {
                let _ = writeln!(
                    t,
                    "{:>4}  {:>8}  {:>9}  {:>21}",
                    s.step, s.distance_valuation, s.precision, s.denominator_valuation
                );
            }
            let _ = writeln!(t, "verdict: {}", verdict_name(&out.verdict));
            let rep = PadicOmegaReport {
                config: config.clone(),
                p: a.p,
                prec_n: a.prec,
                method: method.into(),
                outcome: verdict_name(&out.verdict).into(),
                value,
                defect,
                reference: Some(out.reference.to_digits()),
                fixed_point_check: Some(fixed),
                iteration_trace: Some(out.trace),
            };
            (rep, if converged { EXIT_OK } else { EXIT_INCONCLUSIVE })
        }
    };
    Ok(Outcome {
        code,
        text: render(json, &report, t),
    })
}

fn run_cf(a: &CfArgs, json: bool) -> Result<Outcome, Outcome> {
    if a.digits == 0 || a.terms == 0 {
        return Err(usage("--digits and --terms must be positive"));
    }
    let mut config = RunConfig::new("cf", json);
    config.digits = Some(a.digits);
    config.terms = Some(a.terms);
    let omega = omega_real::omega_newton(a.digits, None).map_err(|e| failure(&e))?.value;
    let cf = diophantine::cf_expand(&omega, a.terms);
    // diagnostics use a tighter enclosure so every certified delta clears the gate
    let fine = omega_real::omega_newton(2 * a.digits + 10, None)
        .map_err(|e| failure(&e))?
        .value;
    let diag = diophantine::irrationality_diagnostics(&fine, &cf).map_err(|e| failure(&e))?;
    let rows: Vec<CfRow> = diag
        .iter()
        .map(|d| {
            let iv = diophantine::delta_interval_string(&d.delta);
            let (lo, hi) = iv.trim_matches(['[', ']']).split_once(", ").unwrap();
            CfRow {
                n: d.n,
                a_n: d.a_n.to_string(),
                p_n: d.p_n.to_string(),
                q_n: d.q_n.to_string(),
                delta: [lo.to_string(), hi.to_string()],
                mu_eff: d.mu_eff,
                r_n: d.r_n,
                running_max_r: d.running_max_r,
            }
        })
        .collect();
    let report = CfReport {
        config: config.clone(),
        label: "empirical: statistics of finitely many convergents, not a bound on the irrationality measure".into(),
        partial_quotients: cf.partial_quotients.iter().map(|a| a.to_string()).collect(),
        certified_terms: cf.partial_quotients.len(),
        stop: cf.stop.clone(),
        rows: rows.clone(),
    };
    let mut t = config.echo();
    let _ = writeln!(t, "# {}", report.label);
    let stop = match &cf.stop {
        CfStop::MaxTerms => "max-terms".to_string(),
        CfStop::Exact => "exact".to_string(),
        CfStop::PrecisionExhausted { certified } => format!("precision exhausted after {certified} terms"),
    };
    let _ = writeln!(t, "# certified partial quotients: {} ({stop})", report.certified_terms);
    let _ = writeln!(t, "n,a_n,p_n,q_n,delta_lo,delta_hi,mu_eff,r_n,running_max_r");
    for r in &rows {
        let _ = writeln!(
            t,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.a_n,
            r.p_n,
            r.q_n,
            r.delta[0],
            r.delta[1],
            diophantine::fmt_stat(r.mu_eff),
            diophantine::fmt_stat(r.r_n),
            diophantine::fmt_stat(r.running_max_r)
        );
    }
    Ok(Outcome {
        code: EXIT_OK,
        text: render(json, &report, t),
    })
}

/// Parses and runs `args` (program name first) without touching standard
/// streams. Parse errors and help text come back as the outcome text.
pub fn run_captured<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(c) => execute(&c),
        Err(e) => Outcome {
            code: if e.use_stderr() { EXIT_USAGE } else { EXIT_OK },
            text: e.to_string(),
        },
    }
}

/// Parses `args` (program name first), runs, and writes the report to
/// standard output or `--out`. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let out = execute(&cli);
    let is_error = out.text.starts_with("error:");
    if is_error {
        eprint!("{}", out.text);
        return out.code;
    }
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.text) {
                eprintln!("error: cannot write {path}: {e}");
                return EXIT_FAILURE;
            }
        }
        None => print!("{}", out.text),
    }
    out.code
}
