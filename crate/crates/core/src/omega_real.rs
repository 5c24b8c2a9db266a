//! The real Omega constant, the root of `x e^x = 1` in `(0, 1)`.
//!
//! Both solvers iterate on exact dyadic centers and certify at the end:
//! `f(x) = x e^x - 1` has `f'(x) = (1 + x) e^x >= 1` on `[0, 1]`, so
//! `|x - Ω| <= |f(x)|` and the value ball is `x ± |f(x)|`.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::ball::{digits_to_bits, BallReal};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaMethod {
    Iterate,
    Newton,
}

#[derive(Clone, Debug)]
pub struct OmegaResult {
    pub value: BallReal,
    pub iterations: usize,
    /// Enclosure of `|x e^x - 1|` at the final center.
    pub residual: BallReal,
    pub certified_digits: u32,
    /// `log2` upper bound of the residual after each step.
    pub residual_trace: Vec<i64>,
}

/// Guard digits used above the requested precision.
pub fn guard_digits(prec: u32) -> u32 {
    10 + (32 - prec.saturating_sub(1).leading_zeros())
}

const MAX_STEPS: usize = 200;

/// Runs `step` from `x0` until `prec` decimals of the enclosure are
/// certified. The working precision grows with the measured accuracy so
/// early steps stay cheap.
fn solve<F>(prec: u32, x0: &Rational, step: F) -> Result<OmegaResult>
where
    F: Fn(&BallReal, &BallReal, u64) -> Result<BallReal>,
{
    if prec == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1 digit".into()));
    }
    let full = digits_to_bits((prec + guard_digits(prec)) as u64);
    let one = BallReal::one();
    let mut x = BallReal::from_rational(x0, full).center();
    let mut trace = Vec::new();
    let mut best_at_full: Option<i64> = None;
    let mut wp: u64 = 64.min(full);
    for it in 0..=MAX_STEPS {
        let e = x.exp(wp);
        let resid = x.mul(&e, wp).sub(&one, wp);
        let r = resid.mag_upper();
        let rlog = log2_upper(&r);
        trace.push(rlog);
        if wp == full {
            let value = x.add(
                &BallReal::new(BigInt::zero(), r.exponent(), r.mid().magnitude().clone()),
                full,
            );
            let digits = value.certified_decimals(prec).unwrap_or(0);
            if digits >= prec {
                return Ok(OmegaResult {
                    value,
                    iterations: it,
                    residual: resid.abs(),
                    certified_digits: digits,
                    residual_trace: trace,
                });
            }
            if best_at_full.is_some_and(|b| rlog >= b) {
                return Err(Error::NoConvergence { iterations: it });
            }
            best_at_full = Some(rlog);
        }
        x = step(&x, &e, wp)?.center();
        // x now has about 2 acc correct bits, and the next step should
        // produce 4 acc; keep 64 bits of slack
        let acc = (-rlog).max(0) as u64;
        wp = full.min((4 * acc + 64).max(wp));
    }
    Err(Error::NoConvergence { iterations: MAX_STEPS })
}

/// `ceil(log2)` of an upper bound on `|x|`, or a large negative value for
/// exact zero.
fn log2_upper(x: &BallReal) -> i64 {
    let u = x.mag_upper();
    if u.mid().is_zero() {
        i64::MIN / 4
    } else {
        u.mid().bits() as i64 + u.exponent()
    }
}

/// `x_{n+1} = (1 + x_n) / (1 + e^{x_n})`.
pub fn omega_iterate(prec: u32, x0: Option<&Rational>) -> Result<OmegaResult> {
    let x0 = x0.cloned().unwrap_or_else(|| exact::int(1));
    let one = BallReal::one();
    solve(prec, &x0, |x, e, wp| x.add(&one, wp).div(&e.add(&one, wp), wp))
}

/// Newton's method on `x e^x - 1`, by default from `x0 = 1/2`.
pub fn omega_newton(prec: u32, x0: Option<&Rational>) -> Result<OmegaResult> {
    let x0 = x0.cloned().unwrap_or_else(|| exact::rat(1, 2));
    let one = BallReal::one();
    solve(prec, &x0, |x, e, wp| {
        let f = x.mul(e, wp).sub(&one, wp);
        let df = e.mul(&x.add(&one, wp), wp);
        Ok(x.sub(&f.div(&df, wp)?, wp))
    })
}

fn working_bits(x: &BallReal) -> u64 {
    match x.rad_log2() {
        Some(l) => ((-l).max(0) as u64) + 64,
        None => x.mid().bits() + 64,
    }
}

/// Enclosure of `|-ln(ω) - ω|`.
pub fn minus_log_check(omega: &BallReal) -> Result<BallReal> {
    if !omega.is_positive() || !omega.lt(&BallReal::one()) {
        return Err(Error::InvalidArgument("omega must lie in (0, 1)".into()));
    }
    let wp = working_bits(omega);
    Ok(omega.ln(wp)?.neg().sub(omega, wp).abs())
}

/// Enclosures of `ω^n e^{nω} = (ω e^ω)^n` for `n = 0..=n_max`.
pub fn abel_check(omega: &BallReal, n_max: u32) -> Vec<BallReal> {
    let wp = working_bits(omega);
    let t = omega.mul(&omega.exp(wp), wp);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut acc = BallReal::one();
    out.push(acc.clone());
    for _ in 0..n_max {
        acc = acc.mul(&t, wp);
        out.push(acc.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    const OMEGA_60: &str = "0.567143290409783872999968662210355549753815787186512508135131";

    #[test]
    fn guard_policy() {
        assert_eq!(guard_digits(1), 10);
        assert_eq!(guard_digits(60), 16);
        assert_eq!(guard_digits(64), 16);
        assert_eq!(guard_digits(10_000), 24);
    }

    #[test]
    fn first_iterate() {
        // 2 / (1 + e) = 0.5378828427399902...
        let wp = 128;
        let x = BallReal::one();
        let one = BallReal::one();
        let x1 = x.add(&one, wp).div(&x.exp(wp).add(&one, wp), wp).unwrap();
        assert!(x1.lower() > rat(53788284273, 100_000_000_000));
        assert!(x1.upper() < rat(53788284274, 100_000_000_000));
    }

    #[test]
    fn sixty_digits_both_methods() {
        let a = omega_iterate(60, None).unwrap();
        let b = omega_newton(60, None).unwrap();
        assert_eq!(a.value.to_decimal_string(60), OMEGA_60);
        assert_eq!(b.value.to_decimal_string(60), OMEGA_60);
        assert!(a.value.overlaps(&b.value));
        assert!(a.residual.upper() < rat(1, 1) / num_traits::pow(exact::int(10), 59));
    }

    #[test]
    fn five_digits() {
        let r = omega_newton(5, None).unwrap();
        assert_eq!(r.value.to_decimal_string(5), "0.56714");
        assert_eq!(r.certified_digits, 5);
    }

    #[test]
    fn seed_zero_reaches_same_limit() {
        let a = omega_iterate(100, Some(&exact::int(0))).unwrap();
        let b = omega_iterate(100, None).unwrap();
        assert!(a.value.overlaps(&b.value));
        assert_eq!(a.value.to_decimal_string(100), b.value.to_decimal_string(100));
    }

    #[test]
    fn solvers_overlap_across_precisions() {
        for prec in [10, 100, 1000] {
            let a = omega_iterate(prec, None).unwrap();
            let b = omega_newton(prec, None).unwrap();
            assert!(a.value.overlaps(&b.value), "prec = {prec}");
            assert!(a.certified_digits >= prec);
        }
    }

    #[test]
    fn iteration_is_quadratic() {
        let r = omega_iterate(2000, None).unwrap();
        let t = &r.residual_trace;
        // from the first iterate on, until the precision floor
        for k in 1..t.len() - 1 {
            let (a, b) = (-t[k], -t[k + 1]);
            if a < 8 || b > 6000 {
                continue;
            }
            assert!(b as f64 >= 1.8 * a as f64, "step {k}: {a} -> {b}");
        }
    }

    #[test]
    fn newton_is_quadratic() {
        let r = omega_newton(2000, None).unwrap();
        let t = &r.residual_trace;
        for k in 0..t.len() - 1 {
            let (a, b) = (-t[k], -t[k + 1]);
            if a < 8 || b > 6000 {
                continue;
            }
            assert!(b as f64 >= 1.8 * a as f64, "step {k}: {a} -> {b}");
        }
    }

    #[test]
    fn minus_log_examples() {
        let om = omega_iterate(60, None).unwrap().value;
        let c = minus_log_check(&om).unwrap();
        assert!(c.contains_zero());
        assert!(c.upper() - c.lower() <= rat(1, 1) / num_traits::pow(exact::int(10), 58));

        let half = BallReal::from_rational(&rat(1, 2), 64);
        assert!(!minus_log_check(&half).unwrap().contains_zero());

        let wide = om.add(&BallReal::from_interval(&rat(-1, 1000), &rat(1, 1000), 64), 256);
        let w = minus_log_check(&wide).unwrap();
        assert!(w.contains_zero());
        let width = w.upper() - w.lower();
        assert!(width > rat(1, 1000) && width < rat(1, 100));
    }

    #[test]
    fn abel_property() {
        let om = omega_iterate(60, None).unwrap().value;
        let v = abel_check(&om, 20);
        assert!(v[0].is_exact() && v[0].contains_rational(&exact::int(1)));
        for (n, b) in v.iter().enumerate() {
            assert!(b.contains_rational(&exact::int(1)), "n = {n}");
        }
        let w = &v[20];
        assert!(w.upper() - w.lower() <= rat(1, 1) / num_traits::pow(exact::int(10), 50));
    }
}
