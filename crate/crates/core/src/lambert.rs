//! Lambert W on the principal real branch.
//!
//! Inside `|x| < 1/e` the powers of W have the expansion
//!
//! ```text
//! W(x)^k = sum_{n >= 0} k (-1)^n (n + k)^{n-1} / n! * x^{n+k}
//! ```
//!
//! which is evaluated with an explicit tail bound. Outside the disk a
//! Newton solver on `w e^w = x` takes over.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::ball::{digits_to_bits, BallReal};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::powser::TruncSeries;

/// Rational upper bound for `e`.
fn e_upper() -> Rational {
    exact::rat(27_182_818_285, 10_000_000_000)
}

/// Rational lower bound for `e`.
fn e_lower() -> Rational {
    exact::rat(2_718_281_828, 1_000_000_000)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WSeriesSpec {
    pub k: u32,
    pub terms: usize,
    /// Entry `n` is the coefficient of `x^{n+k}`.
    #[serde(with = "fraction_list")]
    pub coeffs: Vec<Rational>,
}

mod fraction_list {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::exact::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let items: Vec<String> = v.iter().map(|c| format!("{}/{}", c.numer(), c.denom())).collect();
        items.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        items
            .iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// `k (-1)^n (n + k)^{n-1} / n!`.
pub fn w_coeff(k: u32, n: usize) -> Rational {
    let base = BigInt::from(n as u64 + k as u64);
    let mut c = if n == 0 {
        Rational::new(BigInt::from(k), base)
    } else {
        Rational::new(
            BigInt::from(k) * num_traits::pow(base, n - 1),
            exact::factorial(n as u64),
        )
    };
    if n % 2 == 1 {
        c = -c;
    }
    c
}

pub fn w_series_coeffs(k: u32, terms: usize) -> Result<WSeriesSpec> {
    if k == 0 || terms == 0 {
        return Err(Error::InvalidArgument("k and terms must be positive".into()));
    }
    Ok(WSeriesSpec {
        k,
        terms,
        coeffs: (0..terms).map(|n| w_coeff(k, n)).collect(),
    })
}

impl WSeriesSpec {
    /// `W(x)^k` as a truncated series of order `k + terms - 1`.
    pub fn to_series(&self) -> TruncSeries {
        TruncSeries::new(self.coeffs.clone()).shift_up(self.k as usize)
    }
}

/// Enclosure of `W(x)^k` from the series, to about `digits` decimals.
///
/// The ratio of consecutive terms is
/// `|x| (n+k+1)^n / ((n+k)^{n-1} (n+1)) <= |x| e (n+k) / (n+1) =: q_n`,
/// using `(1 + 1/m)^n <= e` for `n <= m`. Since `q_n` does not increase, the
/// tail from `N` on is at most `|t_N| / (1 - q_N)` once `q_N < 1`.
pub fn w_eval_series(x: &Rational, k: u32, digits: u32) -> Result<BallReal> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let ax = x.abs();
    let eu = e_upper();
    if &ax * &eu >= Rational::one() {
        return Err(Error::OutsideRadius);
    }
    if x.is_zero() {
        return Ok(BallReal::zero());
    }
    let prec = digits_to_bits(digits as u64) + 32;
    let wp = prec + 32;
    let target = Rational::new(BigInt::one(), BigInt::one() << (prec as usize));
    let xb = BallReal::from_rational(x, wp);
    let kb = BallReal::from_int(k as i64);
    // t_n = k (n+k)^{n-1} x^{n+k} (-1)^n / n!, with x^{n+k} / n! carried along
    let mut xf = xb.pow(k, wp);
    let mut sum = BallReal::zero();
    let mut n = 0usize;
    loop {
        let base = BallReal::from_int(n as i64 + k as i64);
        let t = if n == 0 {
            kb.mul(&xf, wp).div(&base, wp)?
        } else {
            kb.mul(&base.pow(n as u32 - 1, wp), wp).mul(&xf, wp)
        };
        let t = if n % 2 == 1 { t.neg() } else { t };
        let q = &ax * &eu * Rational::new(BigInt::from(n as u64 + k as u64), BigInt::from(n as u64 + 1));
        if q < Rational::one() {
            let tmag = t.mag_upper().upper();
            let tail = tmag / (Rational::one() - q);
            if tail < target {
                let tail_ball = BallReal::from_interval(&-tail.clone(), &tail, 64);
                return Ok(sum.add(&tail_ball, prec).normalize(prec));
            }
        }
        sum = sum.add(&t, wp);
        n += 1;
        xf = xf.mul(&xb, wp).div(&BallReal::from_int(n as i64), wp)?;
    }
}

/// Gap kept between arguments and the branch point.
fn branch_margin() -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << 20usize)
}

/// Enclosure of `W(x)` for `x >= -1/e + 2^-20`, by Newton's method.
///
/// `W` is increasing, so a ball argument is handled by solving at both
/// endpoints.
pub fn w_newton_real(x: &BallReal, digits: u32) -> Result<BallReal> {
    let lo = x.lower();
    let limit = -(Rational::one() / e_lower()) + branch_margin();
    if lo < limit {
        return Err(Error::BelowBranchPoint);
    }
    let prec = digits_to_bits(digits as u64) + 32;
    if x.is_exact() {
        return w_at_point(&lo, prec);
    }
    let a = w_at_point(&lo, prec)?;
    let b = w_at_point(&x.upper(), prec)?;
    Ok(a.hull(&b, prec))
}

fn seed(x: f64) -> f64 {
    let mut w = if x < -0.25 {
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0
    } else if x < 3.0 {
        (1.0 + x).ln() * 0.8
    } else {
        let l = x.ln();
        l - l.ln()
    };
    for _ in 0..6 {
        let ew = w.exp();
        let f = w * ew - x;
        let d = ew * (w + 1.0);
        if d.abs() < 1e-300 {
            break;
        }
        w -= f / d;
    }
    w
}

/// Solves `w e^w = c` for a rational `c` and certifies the root.
fn w_at_point(c: &Rational, prec: u64) -> Result<BallReal> {
    if c.is_zero() {
        return Ok(BallReal::zero());
    }
    let cb = BallReal::from_rational(c, prec + 32);
    let one = BallReal::one();
    let mut y = BallReal::from_f64(seed(c.to_f64().unwrap_or(0.0)));
    let mut ladder = Vec::new();
    let mut p = prec + 32;
    while p > 40 {
        ladder.push(p);
        p = p / 2 + 8;
    }
    ladder.push(40);
    ladder.reverse();
    ladder.push(prec + 32);
    for &p in &ladder {
        let e = y.exp(p);
        let f = y.mul(&e, p).sub(&cb, p);
        let d = e.mul(&y.add(&one, p), p);
        y = y.sub(&f.div(&d, p)?, p).center();
    }

    let wp = prec + 32;
    let e = y.exp(wp);
    let resid = y.mul(&e, wp).sub(&cb, wp).mag_upper();
    let d = e.mul(&y.add(&one, wp), wp);
    if !d.is_positive() {
        return Err(Error::BelowBranchPoint);
    }
    // candidate radius, then check that g' stays above m on y ± rho
    let rho = resid.mul(&BallReal::from_int(2), 64).div(&d, 64)?.mag_upper();
    let left = y.sub(&rho, wp);
    let m = left.add(&one, wp).mul(&left.exp(wp), wp);
    if !m.is_positive() {
        return Err(Error::NoConvergence {
            iterations: ladder.len(),
        });
    }
    let bound = resid.div(&m, 64)?.mag_upper();
    if !(bound.upper() <= rho.upper()) {
        return Err(Error::NoConvergence {
            iterations: ladder.len(),
        });
    }
    let r = bound.upper();
    Ok(y.add(&BallReal::from_interval(&-r.clone(), &r, 64), wp).normalize(prec))
}
