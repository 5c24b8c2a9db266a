//! The p-adic Omega constant `Ω_p = W_p(p)`, where `W_p` is the formal
//! inverse of `x E_p(x)`.
//!
//! Three routes are provided: evaluating the reverted series at `p`, Newton
//! lifting of `x E_p(x) = p` (the reference), and the fixed-point iteration
//! `x <- (p + x) / (1 + E_p(x))` from `x_0 = p`, run as an instrumented
//! experiment.
//!
//! At the fixed point the step map has derivative
//! `(1 + E - (p + Ω) E') / (1 + E)^2`. Since `E_p(Ω_p) ≡ E_p'(Ω_p) ≡ 1` and
//! `p + Ω_p ≡ 0 (mod p)`, this is `≡ 1/2 (mod p)`, a unit for odd `p`. So
//! the distance `v(x_n - Ω_p)` is expected to stay constant rather than
//! grow. The experiment measures this and never forces convergence.

use serde::{Deserialize, Serialize};

use crate::artin_hasse::{ah_exp_form, check_p_integral, IntegralityReport};
use crate::error::{Error, Result};
use crate::exact;
use crate::padic::{eval_truncated, hensel_lift, PadicInt, PadicSeries};
use crate::powser::TruncSeries;

/// Number of consecutive steps with an unchanged distance after which the
/// iteration is declared stagnant.
pub const STAGNATION_WINDOW: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationStep {
    pub step: usize,
    /// `v(x_n - Ω_p)`, capped at `precision`.
    pub distance_valuation: u32,
    /// Digits of `x_n` still certified after divisions by non-units.
    pub precision: u32,
    /// Valuation of `1 + E_p(x_{n-1})` in the step that produced `x_n`.
    pub denominator_valuation: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub p: u64,
    #[serde(rename = "precN")]
    pub prec_n: u32,
    pub working_precision: u32,
    pub steps: Vec<IterationStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Series,
    Hensel,
    PaperIteration,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Hensel => "hensel",
            Method::PaperIteration => "paper-iteration",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicOmegaResult {
    pub p: u64,
    pub prec_n: u32,
    pub value: PadicInt,
    pub method: Method,
    /// `v(Ω E_p(Ω) - p)` at the value's precision.
    pub defect: u32,
    pub iteration_trace: Option<IterationTrace>,
}

fn check_prime(p: u64) -> Result<()> {
    if !exact::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

fn check_prec(prec_n: u32) -> Result<()> {
    if prec_n < 2 {
        return Err(Error::InvalidArgument("precN must be at least 2".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WpSeries {
    pub p: u64,
    pub series: TruncSeries,
    pub integrality: IntegralityReport,
}

/// `W_p` to order `N` by reverting `x E_p(x)`.
pub fn wp_series(p: u64, order: usize) -> Result<WpSeries> {
    check_prime(p)?;
    if order < 2 {
        return Err(Error::InvalidArgument("order must be at least 2".into()));
    }
    let xe = x_times_ep(p, order)?;
    let series = xe.revert()?;
    let integrality = check_p_integral(&series, p);
    Ok(WpSeries { p, series, integrality })
}

/// `x E_p(x)` to order `N`.
pub fn x_times_ep(p: u64, order: usize) -> Result<TruncSeries> {
    Ok(ah_exp_form(p, order - 1)?.series.shift_up(1))
}

/// `E_p` and `E_p'` mapped into `Z/p^prec`, enough terms for arguments of
/// positive valuation.
#[derive(Clone, Debug)]
pub struct EpEvaluator {
    p: u64,
    prec: u32,
    ep: PadicSeries,
    dep: PadicSeries,
}

impl EpEvaluator {
    pub fn new(p: u64, prec: u32) -> Result<Self> {
        check_prime(p)?;
        // c_m x^m has valuation >= m once v(x) >= 1, so order prec suffices
        let s = ah_exp_form(p, prec.max(1) as usize + 1)?.series;
        let ep = PadicSeries::truncated(&s, p, prec)?;
        let dep = PadicSeries::truncated(&s.derivative(), p, prec)?;
        Ok(EpEvaluator { p, prec, ep, dep })
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn eval(&self, x: &PadicInt) -> Result<PadicInt> {
        self.ep.eval(x)
    }

    pub fn eval_derivative(&self, x: &PadicInt) -> Result<PadicInt> {
        self.dep.eval(x)
    }

    /// `x E_p(x) - p`.
    pub fn defining_residual(&self, x: &PadicInt) -> Result<PadicInt> {
        let e = self.eval(x)?;
        let pp = PadicInt::from_i64(self.p, e.prec(), self.p as i64);
        x.try_mul(&e)?.try_sub(&pp)
    }
}

/// `v(c E_p(c) - p)` at the candidate's precision.
pub fn verify_defining_identity(p: u64, candidate: &PadicInt) -> Result<u32> {
    if candidate.p() != p {
        return Err(Error::PrimeMismatch(p, candidate.p()));
    }
    EpEvaluator::new(p, candidate.prec())?
        .defining_residual(candidate)
        .map(|r| r.valuation())
}

/// `Ω_p = W_p(p)` by series evaluation.
pub fn omega_p_series(p: u64, prec_n: u32) -> Result<PadicOmegaResult> {
    check_prime(p)?;
    check_prec(prec_n)?;
    let w = wp_series(p, prec_n as usize)?;
    if let Some(index) = w.integrality.first_failure {
        return Err(Error::IntegralityViolation { index, p });
    }
    let x = PadicInt::from_i64(p, prec_n, p as i64);
    let value = eval_truncated(&w.series, &x)?;
    debug_assert_eq!(value.prec(), prec_n);
    let defect = verify_defining_identity(p, &value)?;
    if defect < prec_n {
        return Err(Error::PrecisionExhausted(format!(
            "series value has defect {defect} < {prec_n}"
        )));
    }
    Ok(PadicOmegaResult {
        p,
        prec_n,
        value,
        method: Method::Series,
        defect,
        iteration_trace: None,
    })
}

/// `Ω_p` by Newton lifting of `F(x) = x E_p(x) - p` from `x_0 = p`.
pub fn omega_p_hensel(p: u64, prec_n: u32) -> Result<PadicOmegaResult> {
    check_prime(p)?;
    check_prec(prec_n)?;
    let value = hensel_value(p, prec_n)?;
    let defect = verify_defining_identity(p, &value)?;
    if defect < prec_n {
        return Err(Error::PrecisionExhausted(format!(
            "hensel value has defect {defect} < {prec_n}"
        )));
    }
    Ok(PadicOmegaResult {
        p,
        prec_n,
        value,
        method: Method::Hensel,
        defect,
        iteration_trace: None,
    })
}

fn hensel_value(p: u64, prec: u32) -> Result<PadicInt> {
    let ev = EpEvaluator::new(p, prec)?;
    let f = |x: &PadicInt| -> Result<(PadicInt, PadicInt)> {
        let e = ev.eval(x)?;
        let de = ev.eval_derivative(x)?;
        let pp = PadicInt::from_i64(p, e.prec(), p as i64);
        let fx = x.try_mul(&e)?.try_sub(&pp)?;
        let dfx = e.try_add(&x.try_mul(&de)?)?;
        Ok((fx, dfx))
    };
    let x0 = PadicInt::from_i64(p, prec, p as i64);
    Ok(hensel_lift(f, &x0, prec)?.root)
}

/// One step `x -> (p + x) / (1 + E_p(x))`. Returns the new iterate and the
/// valuation of the denominator, which is also the number of digits lost.
pub fn paper_step(ev: &EpEvaluator, x: &PadicInt) -> Result<(PadicInt, u32)> {
    let p = x.p();
    let e = ev.eval(x)?;
    let one = PadicInt::one(p, e.prec());
    let den = one.try_add(&e)?;
    let num = PadicInt::from_i64(p, x.prec(), p as i64).try_add(x)?;
    let dv = den.valuation();
    if dv == 0 {
        return Ok((num.try_mul(&den.inv()?)?, 0));
    }
    let q = num.div_with_loss(&den)?;
    Ok((q, dv))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converged,
    Stagnated,
    PrecisionExhausted,
    /// `v(p + x_n) < v(1 + E_p(x_n))`: the next iterate is not in `Z_p`.
    LeftIntegers,
}

#[derive(Debug, Clone)]
pub struct IterationOutcome {
    pub verdict: Verdict,
    /// Last iterate computed.
    pub last: PadicInt,
    pub reference: PadicInt,
    pub trace: IterationTrace,
}

/// Runs the iteration and records `v(x_n - Ω_p)` against the Hensel value.
///
/// Odd `p` keeps `1 + E_p(x)` a unit and works at `precN`. For `p = 2` the
/// denominator is never a unit; the run starts at `2 precN` digits and each
/// division removes `v(1 + E_2(x_n))` of them. Stops when the distance reaches
/// `precN`, when it has not changed for [`STAGNATION_WINDOW`] steps, when
/// fewer than `precN` digits remain, or after `max_steps`.
pub fn run_paper_iteration(p: u64, prec_n: u32, max_steps: usize) -> Result<IterationOutcome> {
    check_prime(p)?;
    check_prec(prec_n)?;
    if max_steps == 0 {
        return Err(Error::InvalidArgument("max_steps must be at least 1".into()));
    }
    let working = if p == 2 { 2 * prec_n } else { prec_n };
    let ev = EpEvaluator::new(p, working)?;
    let reference = hensel_value(p, working)?;
    let distance = |x: &PadicInt| -> u32 {
        let prec = x.prec().min(prec_n);
        x.reduce_to(prec)
            .try_sub(&reference.reduce_to(prec))
            .map(|d| d.valuation())
            .unwrap_or(0)
    };
    let mut x = PadicInt::from_i64(p, working, p as i64);
    let mut steps = vec![IterationStep {
        step: 0,
        distance_valuation: distance(&x),
        precision: x.prec(),
        denominator_valuation: 0,
    }];
    let verdict = loop {
        let last = steps.last().unwrap();
        if last.distance_valuation >= prec_n && last.precision >= prec_n {
            break Verdict::Converged;
        }
        if last.precision < prec_n {
            break Verdict::PrecisionExhausted;
        }
        if steps.len() > STAGNATION_WINDOW {
            let tail = &steps[steps.len() - 1 - STAGNATION_WINDOW..];
            if tail.iter().all(|s| s.distance_valuation == last.distance_valuation) {
                break Verdict::Stagnated;
            }
        }
        if steps.len() > max_steps {
            break Verdict::Stagnated;
        }
        let (next, dv) = match paper_step(&ev, &x) {
            Ok(r) => r,
            Err(Error::NonUnit) => break Verdict::LeftIntegers,
            Err(Error::PrecisionExhausted(_)) => break Verdict::PrecisionExhausted,
            Err(e) => return Err(e),
        };
        x = next;
        steps.push(IterationStep {
            step: steps.len(),
            distance_valuation: distance(&x),
            precision: x.prec(),
            denominator_valuation: dv,
        });
    };
    let trace = IterationTrace {
        p,
        prec_n,
        working_precision: working,
        steps,
    };
    Ok(IterationOutcome {
        verdict,
        last: x,
        reference: reference.reduce_to(prec_n),
        trace,
    })
}

/// The iteration as a solver: the converged value, or an error carrying
/// the trace.
pub fn omega_p_paper_iteration(p: u64, prec_n: u32, max_steps: usize) -> Result<PadicOmegaResult> {
    let out = run_paper_iteration(p, prec_n, max_steps)?;
    match out.verdict {
        Verdict::Converged => {
            let value = out.last.reduce_to(prec_n);
            let defect = verify_defining_identity(p, &value)?;
            Ok(PadicOmegaResult {
                p,
                prec_n,
                value,
                method: Method::PaperIteration,
                defect,
                iteration_trace: Some(out.trace),
            })
        }
        Verdict::Stagnated => Err(Error::StagnationDetected(Box::new(out.trace))),
        Verdict::PrecisionExhausted => Err(Error::PrecisionExhausted(format!(
            "iteration lost more than {prec_n} digits after {} steps",
            out.trace.steps.len() - 1
        ))),
        Verdict::LeftIntegers => Err(Error::PrecisionExhausted(format!(
            "iterate {} is not a {p}-adic integer",
            out.trace.steps.len()
        ))),
    }
}

/// Applies one iteration step to the Hensel value at the working precision
/// and reports whether it comes back unchanged (to the digits that survive
/// the division).
pub fn fixed_point_check(p: u64, prec_n: u32) -> Result<bool> {
    check_prime(p)?;
    check_prec(prec_n)?;
    let working = if p == 2 { 2 * prec_n } else { prec_n };
    let ev = EpEvaluator::new(p, working)?;
    let omega = hensel_value(p, working)?;
    let (next, _) = paper_step(&ev, &omega)?;
    Ok(next == omega.reduce_to(next.prec()))
}
