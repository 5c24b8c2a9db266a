//! p-adic integers known modulo `p^N`.
//!
//! An element is a single residue in `[0, p^N)`. Mixed-precision arithmetic
//! truncates to the smaller precision, so no operation claims digits it
//! cannot justify.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::powser::TruncSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicInt {
    p: u64,
    prec: u32,
    residue: BigUint,
    modulus: BigUint,
}

/// Serializable digit form: base-`p` digits, least significant first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicDigits {
    pub p: u64,
    #[serde(rename = "precN")]
    pub prec_n: u32,
    pub digits: Vec<u64>,
}

fn modulus(p: u64, prec: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), prec as usize)
}

impl PadicInt {
    /// Reduces the integer `value` modulo `p^prec`.
    pub fn new(p: u64, prec: u32, value: &BigInt) -> Self {
        let m = modulus(p, prec);
        let r = value.mod_floor(&BigInt::from(m.clone()));
        PadicInt {
            p,
            prec,
            residue: r.to_biguint().unwrap(),
            modulus: m,
        }
    }

    pub fn from_i64(p: u64, prec: u32, value: i64) -> Self {
        Self::new(p, prec, &BigInt::from(value))
    }

    pub fn zero(p: u64, prec: u32) -> Self {
        Self::from_i64(p, prec, 0)
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self::from_i64(p, prec, 1)
    }

    /// Image of a p-integral rational in `Z/p^prec`.
    pub fn from_rational(p: u64, prec: u32, r: &Rational) -> Result<Self> {
        let m = BigInt::from(modulus(p, prec));
        let den_inv = r
            .denom()
            .modinv(&m)
            .ok_or(Error::CoefficientNotPIntegral { index: 0, p })?;
        Ok(Self::new(p, prec, &(r.numer() * den_inv)))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Largest `v <= prec` with `p^v` dividing the residue.
    pub fn valuation(&self) -> u32 {
        if self.residue.is_zero() {
            return self.prec;
        }
        let p = BigUint::from(self.p);
        let mut r = self.residue.clone();
        let mut v = 0;
        loop {
            let (q, rem) = r.div_rem(&p);
            if !rem.is_zero() {
                return v;
            }
            r = q;
            v += 1;
        }
    }

    pub fn is_unit(&self) -> bool {
        self.prec > 0 && !(&self.residue % self.p).is_zero()
    }

    /// Same element known to fewer digits.
    pub fn reduce_to(&self, prec: u32) -> Self {
        assert!(prec <= self.prec, "reduce_to cannot raise precision");
        let m = modulus(self.p, prec);
        PadicInt {
            p: self.p,
            prec,
            residue: &self.residue % &m,
            modulus: m,
        }
    }

    /// Reinterprets the residue at a higher precision. The new digits are
    /// those of the integer representative, not proven digits; this is for
    /// iterations whose accuracy is measured separately.
    pub fn lift_to(&self, prec: u32) -> Self {
        assert!(prec >= self.prec);
        PadicInt {
            p: self.p,
            prec,
            residue: self.residue.clone(),
            modulus: modulus(self.p, prec),
        }
    }

    fn joint(&self, other: &PadicInt) -> Result<(BigUint, BigUint, u32, BigUint)> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        if self.prec == other.prec {
            return Ok((
                self.residue.clone(),
                other.residue.clone(),
                self.prec,
                self.modulus.clone(),
            ));
        }
        let prec = self.prec.min(other.prec);
        let m = modulus(self.p, prec);
        Ok((&self.residue % &m, &other.residue % &m, prec, m))
    }

    pub fn try_add(&self, other: &PadicInt) -> Result<Self> {
        let (a, b, prec, m) = self.joint(other)?;
        Ok(PadicInt {
            p: self.p,
            prec,
            residue: (a + b) % &m,
            modulus: m,
        })
    }

    pub fn try_sub(&self, other: &PadicInt) -> Result<Self> {
        let (a, b, prec, m) = self.joint(other)?;
        let r = if a >= b { a - b } else { &m - (b - a) % &m };
        Ok(PadicInt {
            p: self.p,
            prec,
            residue: r % &m,
            modulus: m,
        })
    }

    pub fn try_mul(&self, other: &PadicInt) -> Result<Self> {
        let (a, b, prec, m) = self.joint(other)?;
        Ok(PadicInt {
            p: self.p,
            prec,
            residue: (a * b) % &m,
            modulus: m,
        })
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnit);
        }
        let r = self.residue.modinv(&self.modulus).ok_or(Error::NonUnit)?;
        Ok(PadicInt {
            p: self.p,
            prec: self.prec,
            residue: r,
            modulus: self.modulus.clone(),
        })
    }

    /// `self / den` when `den` has valuation `v > 0`: both are divided by
    /// `p^v` first, so the quotient is known to `v` fewer digits.
    pub fn div_with_loss(&self, den: &PadicInt) -> Result<Self> {
        let (a, b, prec, _) = self.joint(den)?;
        let a = PadicInt::new(self.p, prec, &BigInt::from(a));
        let b = PadicInt::new(self.p, prec, &BigInt::from(b));
        let v = b.valuation();
        if v >= prec {
            return Err(Error::PrecisionExhausted(format!(
                "divisor vanishes modulo {}^{prec}",
                self.p
            )));
        }
        if a.valuation() < v {
            return Err(Error::NonUnit);
        }
        let pv = num_traits::pow(BigUint::from(self.p), v as usize);
        let new_prec = prec - v;
        let num = PadicInt::new(self.p, new_prec, &BigInt::from(&a.residue / &pv));
        let den = PadicInt::new(self.p, new_prec, &BigInt::from(&b.residue / &pv));
        num.try_mul(&den.inv()?)
    }

    /// Base-`p` digits, least significant first, `prec` of them.
    pub fn digits(&self) -> Vec<u64> {
        let p = BigUint::from(self.p);
        let mut r = self.residue.clone();
        (0..self.prec)
            .map(|_| {
                let (q, d) = r.div_rem(&p);
                r = q;
                d.to_u64().unwrap()
            })
            .collect()
    }

    pub fn to_digits(&self) -> PadicDigits {
        PadicDigits {
            p: self.p,
            prec_n: self.prec,
            digits: self.digits(),
        }
    }

    pub fn from_digits(d: &PadicDigits) -> Result<Self> {
        if d.digits.len() != d.prec_n as usize || d.digits.iter().any(|&x| x >= d.p) {
            return Err(Error::InvalidArgument("malformed p-adic digit list".into()));
        }
        let p = BigUint::from(d.p);
        let r = d.digits.iter().rev().fold(BigUint::zero(), |acc, &x| acc * &p + x);
        Ok(PadicInt::new(d.p, d.prec_n, &BigInt::from(r)))
    }
}

/// `d0 d1 d2 ... (base p)`, least significant digit first.
impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits: Vec<String> = self.digits().iter().map(|d| d.to_string()).collect();
        write!(f, "{} (base {})", digits.join(" "), self.p)
    }
}

impl Add for &PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: &PadicInt) -> PadicInt {
        self.try_add(rhs).expect("p-adic prime mismatch")
    }
}

impl Sub for &PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: &PadicInt) -> PadicInt {
        self.try_sub(rhs).expect("p-adic prime mismatch")
    }
}

impl Mul for &PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: &PadicInt) -> PadicInt {
        self.try_mul(rhs).expect("p-adic prime mismatch")
    }
}

impl Neg for &PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        &PadicInt::zero(self.p, self.prec) - self
    }
}

/// Series coefficients mapped once into `Z/p^prec` for repeated evaluation.
#[derive(Clone, Debug)]
pub struct PadicSeries {
    p: u64,
    prec: u32,
    coeffs: Vec<BigUint>,
    /// Whether terms past the stored coefficients are unknown (truncated
    /// series) rather than zero (polynomial).
    truncated: bool,
}

impl PadicSeries {
    fn build(coeffs: &[Rational], p: u64, prec: u32, truncated: bool) -> Result<Self> {
        let m = BigInt::from(modulus(p, prec));
        let coeffs = coeffs
            .iter()
            .enumerate()
            .map(|(index, c)| {
                let inv = c
                    .denom()
                    .modinv(&m)
                    .ok_or(Error::CoefficientNotPIntegral { index, p })?;
                Ok((c.numer() * inv).mod_floor(&m).to_biguint().unwrap())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PadicSeries {
            p,
            prec,
            coeffs,
            truncated,
        })
    }

    /// A polynomial: terms beyond the list are zero.
    pub fn polynomial(coeffs: &[Rational], p: u64, prec: u32) -> Result<Self> {
        Self::build(coeffs, p, prec, false)
    }

    /// A truncated series: terms beyond its order are unknown.
    pub fn truncated(series: &TruncSeries, p: u64, prec: u32) -> Result<Self> {
        Self::build(series.coeffs(), p, prec, true)
    }

    /// Evaluates at `x` with `v(x) >= 1`. Terms `c_m x^m` with `m v(x) >= N`
    /// vanish modulo `p^N` and are skipped. For a truncated series of order
    /// `K` the result is known only modulo `p^{(K+1) v(x)}`.
    pub fn eval(&self, x: &PadicInt) -> Result<PadicInt> {
        if x.p != self.p {
            return Err(Error::PrimeMismatch(self.p, x.p));
        }
        let v = x.valuation();
        if v == 0 {
            return Err(Error::ArgumentNotInMaximalIdeal);
        }
        let mut prec = x.prec.min(self.prec);
        if self.truncated {
            let known = (self.coeffs.len() as u64) * v as u64;
            prec = prec.min(known.min(u32::MAX as u64) as u32);
        }
        let xr = x.reduce_to(prec);
        let m = xr.modulus.clone();
        let last = (prec / v) as usize;
        let top = last.min(self.coeffs.len() - 1);
        let mut acc = &self.coeffs[top] % &m;
        for k in (0..top).rev() {
            acc = (acc * &xr.residue + &self.coeffs[k]) % &m;
        }
        Ok(PadicInt {
            p: self.p,
            prec,
            residue: acc,
            modulus: m,
        })
    }
}

/// `sum c_m x^m` for a coefficient list treated as a polynomial.
pub fn eval_series(coeffs: &[Rational], x: &PadicInt) -> Result<PadicInt> {
    PadicSeries::polynomial(coeffs, x.p, x.prec)?.eval(x)
}

/// Evaluation of a truncated series; precision drops to what its order
/// supports.
pub fn eval_truncated(series: &TruncSeries, x: &PadicInt) -> Result<PadicInt> {
    PadicSeries::truncated(series, x.p, x.prec)?.eval(x)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HenselStep {
    /// Working precision of the evaluation.
    pub precision: u32,
    /// Valuation of `F(x_k)` measured at that precision.
    pub f_valuation: u32,
}

#[derive(Clone, Debug)]
pub struct HenselLift {
    pub root: PadicInt,
    /// Newton updates performed.
    pub steps: usize,
    pub trace: Vec<HenselStep>,
}

/// Newton lifting of a root of `F` from `x0` to precision `target`.
///
/// `f` returns `(F(x), F'(x))` at the precision of its argument. Requires
/// `v(F(x0)) > 2 v(F'(x0))`. Working precision doubles each step up to
/// `target + v(F'(x0))`.
pub fn hensel_lift<F>(f: F, x0: &PadicInt, target: u32) -> Result<HenselLift>
where
    F: Fn(&PadicInt) -> Result<(PadicInt, PadicInt)>,
{
    let (f0, df0) = f(x0)?;
    let v0 = f0.valuation();
    let d = df0.valuation();
    if d >= df0.prec || v0 <= 2 * d {
        return Err(Error::HenselConditionFailed { f_val: v0, df_val: d });
    }
    let full = target + d;
    let max_steps = 4 * (32 - target.leading_zeros() as usize) + 8;
    let mut x = if x0.prec >= full {
        x0.reduce_to(full)
    } else {
        x0.lift_to(full)
    };
    let mut prec = full.min(2 * v0.max(1));
    let mut trace = Vec::new();
    let mut steps = 0;
    loop {
        let xp = x.reduce_to(prec);
        let (fx, dfx) = f(&xp)?;
        let v = fx.valuation();
        trace.push(HenselStep {
            precision: fx.prec,
            f_valuation: v,
        });
        if prec == full && v >= full {
            break;
        }
        let dv = dfx.valuation();
        if dv != d {
            return Err(Error::DerivativeNotUnitEnough { expected: d, found: dv });
        }
        if v <= 2 * d {
            return Err(Error::HenselConditionFailed { f_val: v, df_val: d });
        }
        let q = fx.div_with_loss(&dfx)?;
        x = &xp.lift_to(full) - &q.lift_to(full);
        steps += 1;
        if steps > max_steps {
            return Err(Error::NoConvergence { iterations: steps });
        }
        prec = full.min(2 * prec);
    }
    Ok(HenselLift {
        root: x.reduce_to(target),
        steps,
        trace,
    })
}
