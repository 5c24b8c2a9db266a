//! Certified continued fractions and rational-approximation statistics.
//!
//! Partial quotients are extracted from both ends of an enclosing interval
//! at once and emitted only while the two agree, so every reported term is
//! correct for every real number in the enclosure.
//!
//! For each convergent `p_n/q_n` the diagnostics report
//! `δ_n = |x - p_n/q_n|`, `μ_eff = -ln δ_n / ln q_n` and
//! `r_n = -ln δ_n / (ln q_n)^2`. A bounded `r_n` is what a lower bound
//! `|x - p/q| > exp(-C (ln q)^2)` would predict. These numbers are empirical
//! and prove nothing about the limit.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::ball::BallReal;
use crate::error::{Error, Result};
use crate::exact::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum CfStop {
    /// The requested number of terms was produced.
    MaxTerms,
    /// The input is an exact rational and its expansion ended.
    Exact,
    /// The endpoints disagree on the next quotient.
    PrecisionExhausted { certified: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFExpansion {
    pub partial_quotients: Vec<BigInt>,
    pub convergents: Vec<(BigInt, BigInt)>,
    pub stop: CfStop,
}

/// Expansion of every real in `[lo, hi]` simultaneously.
pub fn cf_expand_interval(lo: &Rational, hi: &Rational, max_terms: usize) -> CFExpansion {
    assert!(lo <= hi, "empty interval");
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    let mut terms = Vec::new();
    let stop = loop {
        if terms.len() >= max_terms {
            break CfStop::MaxTerms;
        }
        let a = lo.floor();
        if a != hi.floor() {
            break CfStop::PrecisionExhausted { certified: terms.len() };
        }
        terms.push(a.to_integer());
        let fl = &lo - &a;
        let fh = &hi - &a;
        if fl.is_zero() {
            if fh.is_zero() {
                break CfStop::Exact;
            }
            // the interval contains the integer a itself
            break CfStop::PrecisionExhausted { certified: terms.len() };
        }
        // x -> 1/(x - a) reverses the order
        lo = fh.recip();
        hi = fl.recip();
    };
    let convergents = convergents(&terms);
    CFExpansion {
        partial_quotients: terms,
        convergents,
        stop,
    }
}

pub fn cf_expand(x: &BallReal, max_terms: usize) -> CFExpansion {
    cf_expand_interval(&x.lower(), &x.upper(), max_terms)
}

/// `p_n = a_n p_{n-1} + p_{n-2}`, `q_n = a_n q_{n-1} + q_{n-2}` from
/// `p_{-1} = 1, q_{-1} = 0, p_{-2} = 0, q_{-2} = 1`.
pub fn convergents(a: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::with_capacity(a.len());
    for an in a {
        let p = an * &p1 + &p0;
        let q = an * &q1 + &q0;
        debug_assert!(p.gcd(&q).is_one());
        p0 = std::mem::replace(&mut p1, p.clone());
        q0 = std::mem::replace(&mut q1, q.clone());
        out.push((p, q));
    }
    out
}

#[derive(Clone, Debug)]
pub struct DiagnosticRecord {
    pub n: usize,
    pub a_n: BigInt,
    pub p_n: BigInt,
    pub q_n: BigInt,
    /// Enclosure of `|x - p_n/q_n|`.
    pub delta: BallReal,
    pub mu_eff: Option<f64>,
    pub r_n: Option<f64>,
    pub running_max_r: Option<f64>,
}

/// Rounds to 6 significant digits.
fn sig6(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.5e}").parse().unwrap()
}

/// `|x - p_n/q_n|` statistics for every convergent of `cf`.
///
/// Requires the radius of `x` to be at most a tenth of each `δ_n`.
pub fn irrationality_diagnostics(x: &BallReal, cf: &CFExpansion) -> Result<Vec<DiagnosticRecord>> {
    const LOG_BITS: u64 = 96;
    let rad = x.rad_rational();
    let mut out = Vec::with_capacity(cf.convergents.len());
    let mut running: Option<f64> = None;
    for (n, (p, q)) in cf.convergents.iter().enumerate() {
        let c = Rational::new(p.clone(), q.clone());
        let d_mid = (x.mid_rational() - &c).abs();
        if d_mid <= &rad * BigInt::from(10) {
            return Err(Error::PrecisionGateFailed { n });
        }
        let lo = (x.lower() - &c).abs();
        let hi = (x.upper() - &c).abs();
        let (dlo, dhi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let delta = BallReal::from_interval(&dlo, &dhi, 128);
        let (mu, r) = if q.is_one() {
            (None, None)
        } else {
            let ld = delta.ln(LOG_BITS)?.to_f64();
            let lq = BallReal::exact(q.clone(), 0).ln(LOG_BITS)?.to_f64();
            (Some(sig6(-ld / lq)), Some(sig6(-ld / (lq * lq))))
        };
        if let Some(rv) = r {
            running = Some(running.map_or(rv, |m: f64| m.max(rv)));
        }
        out.push(DiagnosticRecord {
            n,
            a_n: cf.partial_quotients[n].clone(),
            p_n: p.clone(),
            q_n: q.clone(),
            delta,
            mu_eff: mu,
            r_n: r,
            running_max_r: running,
        });
    }
    Ok(out)
}

/// All best approximations of the second kind with `q <= q_max`: each
/// strictly improves `|q x - p|` over every smaller denominator.
pub fn best_approx_bruteforce(x: &BallReal, q_max: u64) -> Result<Vec<(BigInt, BigInt)>> {
    let limit = Rational::new(BigInt::one(), BigInt::from(2u64 * q_max * q_max));
    if x.rad_rational() >= limit {
        return Err(Error::PrecisionGateFailed { n: q_max as usize });
    }
    // work with the dyadic center m 2^e and its radius r 2^e
    let e = x.exponent();
    let (m, r, shift) = if e >= 0 {
        (
            x.mid() << e as usize,
            BigInt::from(x.radius().clone()) << e as usize,
            0usize,
        )
    } else {
        (x.mid().clone(), BigInt::from(x.radius().clone()), (-e) as usize)
    };
    let unit = BigInt::one() << shift;
    let half = &unit >> 1usize;
    let mut best: Option<(BigInt, BigInt)> = None; // (lower, upper) of |qx - p| in units 2^-shift
    let mut out = Vec::new();
    for q in 1..=q_max {
        let qm = &m * q;
        let p = (&qm + &half).div_floor(&unit);
        let dist = (&qm - &p * &unit).abs();
        let qr = &r * q;
        let lo = &dist - &qr;
        let hi = &dist + &qr;
        let improves = match &best {
            None => true,
            Some((blo, bhi)) => {
                if hi < *blo {
                    true
                } else if lo >= *bhi {
                    false
                } else {
                    return Err(Error::PrecisionGateFailed { n: q as usize });
                }
            }
        };
        if improves {
            best = Some((lo, hi));
            out.push((p, BigInt::from(q)));
        }
    }
    Ok(out)
}

/// Whether `p/q` is a convergent or a semiconvergent
/// `(p_{n-1} + j p_n) / (q_{n-1} + j q_n)` with `1 <= j <= a_{n+1}`.
pub fn is_convergent_or_semiconvergent(cf: &CFExpansion, p: &BigInt, q: &BigInt) -> bool {
    let target = Rational::new(p.clone(), q.clone());
    let conv = &cf.convergents;
    if conv.iter().any(|(a, b)| Rational::new(a.clone(), b.clone()) == target) {
        return true;
    }
    for n in 0..conv.len() {
        let Some(next) = cf.partial_quotients.get(n + 1) else {
            break;
        };
        let (pm, qm) = if n == 0 {
            (BigInt::one(), BigInt::zero())
        } else {
            conv[n - 1].clone()
        };
        let (pn, qn) = &conv[n];
        // solve q = q_{n-1} + j q_n for j
        if qn.is_zero() || q < &qm {
            continue;
        }
        let (j, rem) = (q - &qm).div_rem(qn);
        if rem.is_zero() && j >= BigInt::one() && &j <= next && &pm + &j * pn == *p {
            return true;
        }
    }
    false
}

/// `6 sig. digit` text for optional statistics.
pub fn fmt_stat(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{}", sig6(v)),
        None => "-".to_string(),
    }
}

/// Decimal rendering of `δ_n` as `[lo, hi]` with 6 significant digits,
/// rounded outward.
pub fn delta_interval_string(d: &BallReal) -> String {
    let lo = d.lower();
    let hi = d.upper();
    format!("[{}, {}]", sci_outward(&lo, false), sci_outward(&hi, true))
}

fn sci_outward(r: &Rational, up: bool) -> String {
    if r.is_zero() {
        return "0".into();
    }
    // scale to [1, 10) with an exact power of ten, then round the mantissa
    let num = r.numer().abs();
    let den = r.denom().clone();
    let mut e10 = ((num.bits() as f64 - den.bits() as f64) * std::f64::consts::LOG10_2).floor() as i64;
    let ten = BigInt::from(10);
    let scaled = |k: i64| -> Rational {
        if k >= 0 {
            Rational::new(num.clone(), &den * num_traits::pow(ten.clone(), k as usize))
        } else {
            Rational::new(&num * num_traits::pow(ten.clone(), (-k) as usize), den.clone())
        }
    };
    while scaled(e10) >= Rational::from_integer(ten.clone()) {
        e10 += 1;
    }
    while scaled(e10) < Rational::one() {
        e10 -= 1;
    }
    let m = scaled(e10) * BigInt::from(100_000);
    let mut mi = if up {
        m.ceil().to_integer()
    } else {
        m.floor().to_integer()
    };
    if mi >= BigInt::from(1_000_000) {
        mi /= 10;
        e10 += 1;
    }
    let s = mi.to_string();
    let sign = if r.is_negative() { "-" } else { "" };
    format!("{sign}{}.{}e{}", &s[..1], &s[1..], e10)
}
