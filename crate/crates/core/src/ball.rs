//! Ball arithmetic over binary fixed-point reals.
//!
//! A [`BallReal`] is a dyadic center `mid · 2^exp` together with a radius
//! `rad · 2^exp`. Every operation returns a ball that contains the exact
//! result for every choice of points in the input balls; rounding error is
//! folded into the radius. Precision arguments are in bits and bound the
//! bit length of the center after normalization.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;

/// Significant bits kept in a normalized radius.
const RAD_BITS: u64 = 64;

const LOG10_2: f64 = std::f64::consts::LOG10_2;

/// Number of bits needed for `digits` decimal digits.
pub fn digits_to_bits(digits: u64) -> u64 {
    (digits as f64 / LOG10_2).ceil() as u64 + 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallReal {
    mid: BigInt,
    exp: i64,
    rad: BigUint,
}

/// Exact dyadic `m · 2^e`, used for endpoints.
#[derive(Clone, Debug)]
struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    fn cmp(&self, other: &Dyadic) -> Ordering {
        let e = self.e.min(other.e);
        let a = &self.m << (self.e - e) as usize;
        let b = &other.m << (other.e - e) as usize;
        a.cmp(&b)
    }

    fn to_rational(&self) -> Rational {
        if self.e >= 0 {
            Rational::from_integer(&self.m << self.e as usize)
        } else {
            Rational::new(self.m.clone(), BigInt::one() << (-self.e) as usize)
        }
    }
}

fn ceil_shr(x: &BigUint, s: u64) -> BigUint {
    if s == 0 {
        return x.clone();
    }
    let q = x >> s as usize;
    if (&q << s as usize) == *x {
        q
    } else {
        q + 1u32
    }
}

/// `sign(v) · floor(|v| · 10^j + 1/2)` for `v = m · 2^e`.
fn round_scaled(m: &BigInt, e: i64, j: i64) -> BigInt {
    let mut num = m.magnitude().clone();
    let mut den = BigUint::one();
    if e >= 0 {
        num <<= e as usize;
    } else {
        den <<= (-e) as usize;
    }
    let ten = BigUint::from(10u32);
    if j >= 0 {
        num *= num_traits::pow(ten, j as usize);
    } else {
        den *= num_traits::pow(ten, (-j) as usize);
    }
    let q = (num * 2u32 + &den) / (den * 2u32);
    BigInt::from_biguint(if m.is_negative() { Sign::Minus } else { Sign::Plus }, q)
}

/// floor(log10(num / den)) for positive integers.
fn floor_log10(num: &BigUint, den: &BigUint) -> i64 {
    let est = ((num.bits() as f64 - den.bits() as f64) * LOG10_2).floor() as i64;
    let ten = BigUint::from(10u32);
    let ge_pow = |k: i64| -> bool {
        // num/den >= 10^k ?
        if k >= 0 {
            num >= &(den * num_traits::pow(ten.clone(), k as usize))
        } else {
            &(num * num_traits::pow(ten.clone(), (-k) as usize)) >= den
        }
    };
    let mut k = est;
    while !ge_pow(k) {
        k -= 1;
    }
    while ge_pow(k + 1) {
        k += 1;
    }
    k
}

fn place_decimal(n: &BigInt, decimals: u32) -> String {
    let neg = n.is_negative();
    let mut s = n.magnitude().to_string();
    let d = decimals as usize;
    if d > 0 {
        if s.len() <= d {
            s = "0".repeat(d + 1 - s.len()) + &s;
        }
        s.insert(s.len() - d, '.');
    }
    if neg {
        s.insert(0, '-');
    }
    s
}

impl BallReal {
    pub fn new(mid: BigInt, exp: i64, rad: BigUint) -> Self {
        BallReal { mid, exp, rad }
    }

    pub fn exact(mid: BigInt, exp: i64) -> Self {
        BallReal {
            mid,
            exp,
            rad: BigUint::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::exact(BigInt::zero(), 0)
    }

    pub fn one() -> Self {
        Self::exact(BigInt::one(), 0)
    }

    pub fn from_int(n: i64) -> Self {
        Self::exact(BigInt::from(n), 0)
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Self::exact(BigInt::from(m) * sign, e)
    }

    /// Enclosure of a rational with a center of roughly `prec` bits.
    pub fn from_rational(r: &Rational, prec: u64) -> Self {
        let den = r.denom();
        if den.is_one() {
            return Self::exact(r.numer().clone(), 0);
        }
        if let Some(tz) = den.trailing_zeros() {
            if (den >> tz as usize).is_one() {
                return Self::exact(r.numer().clone(), -(tz as i64));
            }
        }
        let s = (prec as i64 + den.bits() as i64 - r.numer().bits() as i64 + 2).max(0);
        let q = (r.numer() << s as usize).div_floor(den);
        BallReal {
            mid: q,
            exp: -s,
            rad: BigUint::one(),
        }
    }

    /// Smallest convenient ball containing the rational interval `[lo, hi]`.
    pub fn from_interval(lo: &Rational, hi: &Rational, prec: u64) -> Self {
        assert!(lo <= hi, "empty interval");
        let s = prec as i64 + 2 + lo.denom().bits().max(hi.denom().bits()) as i64
            - lo.numer().bits().max(hi.numer().bits()) as i64;
        let s = s.max(0) as usize;
        let l = (lo.numer() << s).div_floor(lo.denom());
        let h = (hi.numer() << s).div_ceil(hi.denom());
        let mid = (&l + &h).div_floor(&BigInt::from(2));
        let rad = (&h - &mid).max(&mid - &l);
        BallReal {
            mid,
            exp: -(s as i64),
            rad: rad.to_biguint().unwrap(),
        }
    }

    pub fn mid(&self) -> &BigInt {
        &self.mid
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn radius(&self) -> &BigUint {
        &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// The center as an exact ball.
    pub fn center(&self) -> BallReal {
        Self::exact(self.mid.clone(), self.exp)
    }

    pub fn mid_rational(&self) -> Rational {
        Dyadic {
            m: self.mid.clone(),
            e: self.exp,
        }
        .to_rational()
    }

    pub fn rad_rational(&self) -> Rational {
        Dyadic {
            m: BigInt::from(self.rad.clone()),
            e: self.exp,
        }
        .to_rational()
    }

    fn lo_dyadic(&self) -> Dyadic {
        Dyadic {
            m: &self.mid - BigInt::from(self.rad.clone()),
            e: self.exp,
        }
    }

    fn hi_dyadic(&self) -> Dyadic {
        Dyadic {
            m: &self.mid + BigInt::from(self.rad.clone()),
            e: self.exp,
        }
    }

    pub fn lower(&self) -> Rational {
        self.lo_dyadic().to_rational()
    }

    pub fn upper(&self) -> Rational {
        self.hi_dyadic().to_rational()
    }

    /// Upper bound on `|x|` for every `x` in the ball, as an exact ball.
    pub fn mag_upper(&self) -> BallReal {
        Self::exact(BigInt::from(self.mid.magnitude() + &self.rad), self.exp)
    }

    /// log2 of the radius (in absolute terms), or `None` for exact balls.
    pub fn rad_log2(&self) -> Option<i64> {
        if self.rad.is_zero() {
            None
        } else {
            Some(self.rad.bits() as i64 + self.exp)
        }
    }

    pub fn contains_rational(&self, r: &Rational) -> bool {
        &self.lower() <= r && r <= &self.upper()
    }

    pub fn contains(&self, other: &BallReal) -> bool {
        self.lo_dyadic().cmp(&other.lo_dyadic()) != Ordering::Greater
            && other.hi_dyadic().cmp(&self.hi_dyadic()) != Ordering::Greater
    }

    pub fn overlaps(&self, other: &BallReal) -> bool {
        self.lo_dyadic().cmp(&other.hi_dyadic()) != Ordering::Greater
            && other.lo_dyadic().cmp(&self.hi_dyadic()) != Ordering::Greater
    }

    pub fn is_positive(&self) -> bool {
        self.mid.is_positive() && self.mid.magnitude() > &self.rad
    }

    pub fn is_negative(&self) -> bool {
        self.mid.is_negative() && self.mid.magnitude() > &self.rad
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    /// Certainly less than `other` at every point.
    pub fn lt(&self, other: &BallReal) -> bool {
        self.hi_dyadic().cmp(&other.lo_dyadic()) == Ordering::Less
    }

    pub fn to_f64(&self) -> f64 {
        let b = self.mid.bits() as i64;
        let s = (b - 60).max(0);
        let m = (&self.mid >> s as usize).to_f64().unwrap_or(0.0);
        let e = self.exp + s;
        m * 2f64.powi(e.clamp(-2000, 2000) as i32)
    }

    /// Rounds the center to at most `prec` bits and keeps the radius to
    /// [`RAD_BITS`] significant bits, inflating the radius accordingly.
    pub fn normalize(self, prec: u64) -> Self {
        let mb = self.mid.bits();
        let rb = self.rad.bits();
        let mut s = mb.saturating_sub(prec);
        if rb > RAD_BITS {
            s = s.max(rb - RAD_BITS);
        }
        if s == 0 {
            return self;
        }
        let mid = &self.mid >> s as usize;
        let inexact = (&mid << s as usize) != self.mid;
        let mut rad = ceil_shr(&self.rad, s);
        if inexact {
            rad += 1u32;
        }
        BallReal {
            mid,
            exp: self.exp + s as i64,
            rad,
        }
    }

    /// Top bit position of the ball's magnitude; `None` for exact zero.
    fn top(&self) -> Option<i64> {
        if self.mid.is_zero() && self.rad.is_zero() {
            None
        } else {
            Some(self.exp + self.mid.bits().max(self.rad.bits()) as i64)
        }
    }

    /// Center and radius re-expressed in units of `2^e`.
    fn aligned(&self, e: i64) -> (BigInt, BigUint) {
        if self.exp >= e {
            let d = (self.exp - e) as usize;
            (&self.mid << d, &self.rad << d)
        } else {
            let s = (e - self.exp) as u64;
            let m = &self.mid >> s as usize;
            let inexact = (&m << s as usize) != self.mid;
            let mut r = ceil_shr(&self.rad, s);
            if inexact {
                r += 1u32;
            }
            (m, r)
        }
    }

    pub fn neg(&self) -> Self {
        BallReal {
            mid: -&self.mid,
            exp: self.exp,
            rad: self.rad.clone(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            self.neg()
        } else if self.is_positive() {
            self.clone()
        } else {
            // [0, |mid| + rad] as a ball centered at half the upper bound
            let hi = BigInt::from(self.mid.magnitude() + &self.rad);
            BallReal {
                mid: hi.clone(),
                exp: self.exp - 1,
                rad: hi.to_biguint().unwrap(),
            }
        }
    }

    pub fn add(&self, other: &BallReal, prec: u64) -> Self {
        let top = match (self.top(), other.top()) {
            (None, _) => return other.clone().normalize(prec),
            (_, None) => return self.clone().normalize(prec),
            (Some(a), Some(b)) => a.max(b),
        };
        let e = self.exp.min(other.exp).max(top - prec as i64 - 8);
        let (ma, ra) = self.aligned(e);
        let (mb, rb) = other.aligned(e);
        BallReal {
            mid: ma + mb,
            exp: e,
            rad: ra + rb,
        }
        .normalize(prec)
    }

    pub fn sub(&self, other: &BallReal, prec: u64) -> Self {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &BallReal, prec: u64) -> Self {
        let a = self.trimmed(prec);
        let b = other.trimmed(prec);
        let mid = &a.mid * &b.mid;
        let rad = a.mid.magnitude() * &b.rad + b.mid.magnitude() * &a.rad + &a.rad * &b.rad;
        BallReal {
            mid,
            exp: a.exp + b.exp,
            rad,
        }
        .normalize(prec)
    }

    fn trimmed(&self, prec: u64) -> std::borrow::Cow<'_, BallReal> {
        if self.mid.bits() > prec + 64 {
            std::borrow::Cow::Owned(self.clone().normalize(prec + 32))
        } else {
            std::borrow::Cow::Borrowed(self)
        }
    }

    pub fn sqr(&self, prec: u64) -> Self {
        self.mul(self, prec)
    }

    pub fn pow(&self, n: u32, prec: u64) -> Self {
        let mut result = BallReal::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base, prec);
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr(prec);
            }
        }
        result
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_2exp(&self, k: i64) -> Self {
        BallReal {
            mid: self.mid.clone(),
            exp: self.exp + k,
            rad: self.rad.clone(),
        }
    }

    pub fn div(&self, other: &BallReal, prec: u64) -> Result<Self> {
        if !(other.mid.magnitude() > &other.rad) {
            return Err(Error::DivisorStraddlesZero);
        }
        let a = self.trimmed(prec);
        let b = other.trimmed(prec);
        let s = (prec as i64 + 2 + b.mid.bits() as i64 - a.mid.bits() as i64).max(0) as usize;
        let q = (&a.mid << s).div_floor(&b.mid);
        let bm = b.mid.magnitude();
        // |x/y - ma/mb| <= (ra |mb| + |ma| rb) / (|mb| (|mb| - rb))
        let numer = (&a.rad * bm + a.mid.magnitude() * &b.rad) << s;
        let denom = bm * (bm - &b.rad);
        let rad = numer.div_ceil(&denom) + 1u32;
        Ok(BallReal {
            mid: q,
            exp: a.exp - b.exp - s as i64,
            rad,
        }
        .normalize(prec))
    }

    pub fn inv(&self, prec: u64) -> Result<Self> {
        BallReal::one().div(self, prec)
    }

    /// Smallest ball (up to normalization) containing both balls.
    pub fn hull(&self, other: &BallReal, prec: u64) -> Self {
        let lo = std::cmp::min_by(self.lo_dyadic(), other.lo_dyadic(), |a, b| a.cmp(b));
        let hi = std::cmp::max_by(self.hi_dyadic(), other.hi_dyadic(), |a, b| a.cmp(b));
        let e = lo.e.min(hi.e) - 1;
        let l = &lo.m << (lo.e - e) as usize;
        let h = &hi.m << (hi.e - e) as usize;
        let mid = (&l + &h) >> 1usize;
        let rad = (&h - &mid).max(&mid - &l);
        BallReal {
            mid,
            exp: e,
            rad: rad.to_biguint().unwrap(),
        }
        .normalize(prec)
    }

    /// Enclosure of `e^x` for every `x` in the ball.
    pub fn exp(&self, prec: u64) -> Self {
        let center = exp_dyadic(&self.mid, self.exp, prec + 8);
        if self.rad.is_zero() {
            return center.normalize(prec);
        }
        if self.rad.bits() as i64 + self.exp <= 0 {
            // radius r <= 1: |e^{c±r} - e^c| <= 2r e^c
            let factor = BallReal {
                mid: BigInt::one() << (-self.exp) as usize,
                exp: self.exp,
                rad: &self.rad << 1usize,
            };
            center.mul(&factor, prec)
        } else {
            let lo = self.lo_dyadic();
            let hi = self.hi_dyadic();
            let a = exp_dyadic(&lo.m, lo.e, prec + 8);
            let b = exp_dyadic(&hi.m, hi.e, prec + 8);
            a.hull(&b, prec)
        }
    }

    /// Enclosure of `ln x` for every `x` in the ball, which must be
    /// certifiably positive.
    pub fn ln(&self, prec: u64) -> Result<Self> {
        if !self.is_positive() {
            return Err(Error::NonPositiveArgument);
        }
        let wp = prec + 32;
        let c = self.center();
        let mut y = BallReal::from_f64(ln_estimate(&self.mid, self.exp));

        let mut ladder = Vec::new();
        let mut p = wp;
        while p > 48 {
            ladder.push(p);
            p = p / 2 + 4;
        }
        ladder.push(48);
        ladder.reverse();
        // Newton for exp(y) = c: y <- y + c e^{-y} - 1
        for &p in &ladder {
            let t = c.mul(&y.neg().exp(p), p).sub(&BallReal::one(), p);
            y = y.add(&t, p).center();
        }

        for _ in 0..4 {
            let t = self.mul(&y.neg().exp(wp), wp).sub(&BallReal::one(), wp);
            let tmax = t.mag_upper();
            // |t| <= 1/2 gives |ln(1+t) - t| <= t^2
            if tmax.lt(&BallReal::exact(BigInt::one(), -1)) || tmax.mid.is_zero() {
                let t2 = tmax.mul(&tmax, 64).mag_upper();
                let quad = BallReal {
                    mid: BigInt::zero(),
                    exp: t2.exp,
                    rad: t2.mid.magnitude().clone(),
                };
                return Ok(y.add(&t, wp).add(&quad, wp).normalize(prec));
            }
            y = y.add(&t, wp).center();
        }
        Err(Error::NoConvergence {
            iterations: ladder.len() + 4,
        })
    }

    /// Number of fractional decimal digits `d` (at most `max`) such that every
    /// point of the ball rounds to the same `d`-digit decimal.
    pub fn certified_decimals(&self, max: u32) -> Option<u32> {
        let est = match self.rad_log2() {
            None => max as i64,
            Some(l) => (((-l) as f64) * LOG10_2).floor() as i64 + 1,
        };
        let mut d = est.clamp(0, max as i64);
        let lo = self.lo_dyadic();
        let hi = self.hi_dyadic();
        loop {
            if round_scaled(&lo.m, lo.e, d) == round_scaled(&hi.m, hi.e, d) {
                return Some(d as u32);
            }
            if d == 0 {
                return None;
            }
            d -= 1;
        }
    }

    /// Decimal rendering of the center limited to certified digits: fixed
    /// point for magnitudes in `[1e-6, 1e9)`, scientific otherwise.
    pub fn to_decimal_string(&self, max_digits: u32) -> String {
        if self.mid.is_zero() && self.rad.is_zero() {
            return "0".to_string();
        }
        let fixed = if self.mid.is_zero() {
            true
        } else {
            let (num, den) = self.abs_center_parts();
            let e10 = floor_log10(&num, &den);
            (-6..9).contains(&e10)
        };
        if fixed {
            if let Some(d) = self.certified_decimals(max_digits) {
                return place_decimal(&round_scaled(&self.mid, self.exp, d as i64), d);
            }
        } else {
            let (num, den) = self.abs_center_parts();
            let e10 = floor_log10(&num, &den);
            let lo = self.lo_dyadic();
            let hi = self.hi_dyadic();
            let mut s = max_digits.max(1) as i64;
            while s >= 1 {
                let j = s - 1 - e10;
                let a = round_scaled(&lo.m, lo.e, j);
                if a == round_scaled(&hi.m, hi.e, j) {
                    let n = round_scaled(&self.mid, self.exp, j);
                    let digits = n.magnitude().to_string();
                    let (n, e10) = if digits.len() as i64 > s {
                        (round_scaled(&self.mid, self.exp, j - 1), e10 + 1)
                    } else {
                        (n, e10)
                    };
                    let body = place_decimal(&n, (s - 1) as u32);
                    return format!("{body}e{e10}");
                }
                s -= 1;
            }
        }
        format!(
            "{:e} +/- {:e}",
            self.to_f64(),
            self.rad_rational().to_f64().unwrap_or(f64::INFINITY)
        )
    }

    fn abs_center_parts(&self) -> (BigUint, BigUint) {
        let mut num = self.mid.magnitude().clone();
        let mut den = BigUint::one();
        if self.exp >= 0 {
            num <<= self.exp as usize;
        } else {
            den <<= (-self.exp) as usize;
        }
        (num, den)
    }

    /// Upper bound for `|x|` over the ball, `sig` significant digits, rounded up.
    pub fn upper_bound_string(&self, sig: u32) -> String {
        let u = self.mag_upper();
        if u.mid.is_zero() {
            return "0".to_string();
        }
        let (num, den) = u.abs_center_parts();
        let mut e10 = floor_log10(&num, &den);
        let ten = BigUint::from(10u32);
        loop {
            let j = sig as i64 - 1 - e10;
            let (mut n, mut d) = (num.clone(), den.clone());
            if j >= 0 {
                n *= num_traits::pow(ten.clone(), j as usize);
            } else {
                d *= num_traits::pow(ten.clone(), (-j) as usize);
            }
            let q = n.div_ceil(&d);
            if q.to_string().len() as u32 > sig {
                e10 += 1;
                continue;
            }
            return format!("{}e{}", place_decimal(&BigInt::from(q), sig.saturating_sub(1)), e10);
        }
    }
}

impl fmt::Display for BallReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(40))
    }
}

fn ln_estimate(mid: &BigInt, exp: i64) -> f64 {
    let b = mid.bits() as i64;
    let s = (b - 53).max(0);
    let m = (mid >> s as usize).to_f64().unwrap();
    m.ln() + (exp + s) as f64 * std::f64::consts::LN_2
}

/// `e^x` for the exact dyadic `x = m · 2^e`.
///
/// Argument reduction `y = x / 2^k` with `|y| < 2^-t`, fixed-point Taylor
/// series at `w` bits, then `k` ball squarings. Each computed Taylor term is
/// within 6 ulp of the true term and the omitted tail is below 12 ulp once a
/// term rounds to zero, so the series sum carries radius `6n + 12`.
fn exp_dyadic(m: &BigInt, e: i64, prec: u64) -> BallReal {
    if m.is_zero() {
        return BallReal::one();
    }
    let top = m.bits() as i64 + e;
    let t = (prec.sqrt() as i64).max(1);
    let k = (top + t).max(0) as u64;
    let n_est = prec / t as u64 + 4;
    let guard = 2 * (64 - n_est.leading_zeros() as u64) + 12;
    let w = prec + k + guard;

    let sh = e + w as i64 - k as i64;
    let y = if sh >= 0 { m << sh as usize } else { m >> (-sh) as usize };
    let mut term = BigInt::one() << w as usize;
    let mut sum = term.clone();
    let mut n = 0u64;
    loop {
        n += 1;
        term = (&term * &y) >> w as usize;
        term /= n;
        if term.is_zero() {
            break;
        }
        sum += &term;
    }
    let mut b = BallReal {
        mid: sum,
        exp: -(w as i64),
        rad: BigUint::from(6 * n + 12),
    };
    for _ in 0..k {
        b = b.sqr(w);
    }
    b.normalize(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn ball(n: i64, d: i64, prec: u64) -> BallReal {
        BallReal::from_rational(&rat(n, d), prec)
    }

    /// Independent e^x oracle on rationals: Taylor partial sum with the tail
    /// bounded by twice the first omitted term (valid for |x| <= 1).
    fn exp_interval_oracle(x: &Rational, bits: u32) -> (Rational, Rational) {
        let eps = Rational::new(BigInt::one(), BigInt::one() << bits as usize);
        let mut term = int(1);
        let mut sum = int(0);
        let mut n = 0;
        loop {
            sum += &term;
            n += 1;
            term = &term * x / int(n);
            let t: Rational = num_traits::Signed::abs(&term);
            if t < eps {
                let tail = t * int(2);
                return (&sum - &tail, &sum + &tail);
            }
        }
    }

    /// ln 2 = 2 atanh(1/3) = 2 sum 1/((2k+1) 3^(2k+1)); tail bounded by a
    /// geometric series with ratio 1/9.
    fn ln2_oracle(bits: u32) -> (Rational, Rational) {
        let eps = Rational::new(BigInt::one(), BigInt::one() << bits as usize);
        let mut sum = int(0);
        let mut k = 0i64;
        loop {
            let p = num_traits::pow(BigInt::from(3), (2 * k + 1) as usize);
            let term = Rational::new(BigInt::from(2), BigInt::from(2 * k + 1) * p);
            sum += &term;
            if term < eps {
                let tail = term / int(8);
                return (sum.clone(), sum + tail);
            }
            k += 1;
        }
    }

    #[test]
    fn add_examples() {
        let two = BallReal::one().add(&BallReal::one(), 64);
        assert_eq!(two.mid_rational(), int(2));
        assert!(two.is_exact());

        let a = BallReal::new(BigInt::one() << 10usize, -10, BigUint::one());
        let b = BallReal::new(-(BigInt::one() << 10usize), -10, BigUint::one());
        let s = a.add(&b, 64);
        assert_eq!(s.mid_rational(), int(0));
        assert_eq!(s.rad_rational(), rat(1, 512));

        let t = ball(1, 3, 64).add(&ball(2, 3, 64), 64);
        assert!(t.contains_rational(&int(1)));
        assert!(t.rad_log2().unwrap() <= -64 + 2);
    }

    #[test]
    fn mul_div_examples() {
        let six = BallReal::from_int(2).mul(&BallReal::from_int(3), 64);
        assert_eq!(six.mid_rational(), int(6));
        assert!(six.is_exact());

        let x = ball(7, 11, 80);
        let q = x.div(&x, 80).unwrap();
        assert!(q.contains_rational(&int(1)));

        let third = BallReal::one().div(&BallReal::from_int(3), 53).unwrap();
        assert!(third.contains_rational(&rat(1, 3)));
        assert!(third.rad_log2().unwrap() <= -52);

        let straddle = BallReal::new(BigInt::one(), 0, BigUint::from(2u32));
        assert!(matches!(
            BallReal::one().div(&straddle, 64),
            Err(Error::DivisorStraddlesZero)
        ));
    }

    #[test]
    fn exp_examples() {
        let e0 = BallReal::zero().exp(64);
        assert!(e0.contains_rational(&int(1)));

        let e1 = BallReal::one().exp(64);
        let (lo, hi) = exp_interval_oracle(&int(1), 90);
        assert!(e1.contains_rational(&lo) && e1.contains_rational(&hi));
        assert!(e1.rad_log2().unwrap() <= -60);
        assert!(e1.to_decimal_string(15).starts_with("2.718281828459045"));

        let ln2 = BallReal::from_int(2).ln(64).unwrap();
        assert!(ln2.exp(64).contains_rational(&int(2)));
    }

    #[test]
    fn ln_examples() {
        let l1 = BallReal::one().ln(64).unwrap();
        assert!(l1.contains_rational(&int(0)));
        assert!(l1.rad_log2().is_none_or(|r| r <= -60));

        let e = BallReal::one().exp(128);
        assert!(e.ln(128).unwrap().contains_rational(&int(1)));

        let ln2 = BallReal::from_int(2).ln(64).unwrap();
        let (lo, hi) = ln2_oracle(90);
        assert!(ln2.contains_rational(&lo) && ln2.contains_rational(&hi));
        assert!(ln2.to_decimal_string(15).starts_with("0.693147180559945"));

        assert!(matches!(BallReal::zero().ln(64), Err(Error::NonPositiveArgument)));
        assert!(matches!(BallReal::from_int(-3).ln(64), Err(Error::NonPositiveArgument)));
    }

    #[test]
    fn exp_of_large_and_negative_arguments() {
        let x = BallReal::from_int(-7);
        let y = x.exp(100);
        let (lo, hi) = exp_interval_oracle(&rat(-1, 1), 140);
        let lo7 = BallReal::from_rational(&lo, 140).pow(7, 140);
        let hi7 = BallReal::from_rational(&hi, 140).pow(7, 140);
        assert!(y.overlaps(&lo7.hull(&hi7, 140)));
        let big = BallReal::from_int(40).exp(80);
        assert!(big.ln(80).unwrap().contains_rational(&int(40)));
    }

    #[test]
    fn exp_of_wide_ball() {
        let b = BallReal::new(BigInt::from(3), 0, BigUint::from(2u32)); // [1, 5]
        let e = b.exp(64);
        assert!(e.contains(&BallReal::one().exp(200)));
        assert!(e.contains(&BallReal::from_int(5).exp(200)));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(ball(1, 3, 64).to_decimal_string(10), "0.3333333333");
        assert_eq!(ball(2, 3, 64).to_decimal_string(5), "0.66667");
        assert_eq!(BallReal::from_int(-5).to_decimal_string(3), "-5.000");
        let tiny = ball(1, 3_000_000_000, 64);
        assert_eq!(tiny.to_decimal_string(4), "3.333e-10");
        let wide = BallReal::new(BigInt::from(1000), -10, BigUint::from(100u32));
        // [0.879, 1.074]: nothing after the point is certain
        assert_eq!(wide.certified_decimals(10), Some(0));
        assert_eq!(BallReal::exact(BigInt::from(3), -40).upper_bound_string(2), "2.8e-12");
        assert_eq!(BallReal::from_int(1000).upper_bound_string(2), "1.0e3");
    }

    #[test]
    fn precision_scaling_of_exp_and_ln() {
        for (n, d) in [(1, 3), (-5, 7), (22, 7), (1, 1000)] {
            let x = BallReal::from_rational(&rat(n, d), 200);
            let mut last_e: Option<i64> = None;
            let mut last_l: Option<i64> = None;
            for prec in [64, 128, 256, 512] {
                let re = x.exp(prec).rad_log2().unwrap();
                let rl = x.abs().ln(prec).unwrap().rad_log2().unwrap();
                if let Some(l) = last_e {
                    assert!(re <= l);
                }
                if let Some(l) = last_l {
                    assert!(rl <= l);
                }
                last_e = Some(re);
                last_l = Some(rl);
            }
        }
    }

    fn dyadic_ball() -> impl Strategy<Value = BallReal> {
        (any::<i64>(), -70i64..-20, 0u32..4).prop_map(|(m, e, r)| BallReal::new(BigInt::from(m), e, BigUint::from(r)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn field_ops_contain_exact_results(a in dyadic_ball(), b in dyadic_ball(), prec in 20u64..90) {
            for (xa, xb) in [(a.lower(), b.lower()), (a.upper(), b.mid_rational()), (a.mid_rational(), b.upper())] {
                prop_assert!(a.add(&b, prec).contains_rational(&(&xa + &xb)));
                prop_assert!(a.sub(&b, prec).contains_rational(&(&xa - &xb)));
                prop_assert!(a.mul(&b, prec).contains_rational(&(&xa * &xb)));
                if let Ok(q) = a.div(&b, prec) {
                    prop_assert!(q.contains_rational(&(&xa / &xb)));
                }
            }
        }

        #[test]
        fn exp_contains_oracle(m in -(1i64 << 40)..(1i64 << 40), prec in 30u64..200) {
            // x in [-1/2, 1/2]
            let x = BallReal::exact(BigInt::from(m), -41);
            let (lo, hi) = exp_interval_oracle(&x.mid_rational(), (prec * 4) as u32);
            let y = x.exp(prec);
            prop_assert!(y.contains_rational(&lo) && y.contains_rational(&hi));
        }

        #[test]
        fn ln_exp_round_trip(m in -(10i64 << 20)..(10i64 << 20)) {
            let x = BallReal::exact(BigInt::from(m), -20);
            let back = x.exp(128).ln(128).unwrap();
            prop_assert!(back.contains_rational(&x.mid_rational()));
        }
    }
}
