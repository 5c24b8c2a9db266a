//! Truncated formal power series with exact rational coefficients.
//!
//! A [`TruncSeries`] of order `N` stores `c_0..c_N` and stands for the series
//! modulo `x^{N+1}`. Every operation returns the order up to which its result
//! is determined by its inputs.
//!
//! Dense products go through a fraction-free representation (integer
//! numerators over one common denominator) multiplied by Kronecker
//! substitution, so coefficient gcds are taken once per coefficient per
//! product instead of once per term.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<Rational>,
}

impl TruncSeries {
    /// Series from `c_0..c_N`; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least c_0");
        TruncSeries { coeffs }
    }

    /// Integer coefficients, zero-padded up to `order`.
    pub fn from_ints(c: &[i64], order: usize) -> Self {
        let mut coeffs: Vec<Rational> = c.iter().take(order + 1).map(|&v| exact::int(v)).collect();
        coeffs.resize(order + 1, Rational::zero());
        TruncSeries { coeffs }
    }

    pub fn from_rationals(c: &[Rational], order: usize) -> Self {
        let mut coeffs: Vec<Rational> = c.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, Rational::zero());
        TruncSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::from_ints(&[1], order)
    }

    /// The series `x`.
    pub fn x(order: usize) -> Self {
        Self::from_ints(&[0, 1], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a truncated series");
        TruncSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &TruncSeries) -> Self {
        let n = self.order().min(other.order());
        TruncSeries {
            coeffs: (0..=n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(),
        }
    }

    pub fn sub(&self, other: &TruncSeries) -> Self {
        let n = self.order().min(other.order());
        TruncSeries {
            coeffs: (0..=n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Multiplication by `x^k`; the order grows by `k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        TruncSeries { coeffs }
    }

    /// Division by `x^k`. Fails unless the first `k` coefficients vanish.
    fn shift_down(&self, k: usize) -> Option<Self> {
        if k > self.order() || self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(TruncSeries {
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &TruncSeries) -> Self {
        let len = self.order().min(other.order()) + 1;
        let a = IntPoly::from_rationals(&self.coeffs[..len]);
        let b = IntPoly::from_rationals(&other.coeffs[..len]);
        TruncSeries {
            coeffs: a.mul_trunc(&b, len).into_rationals(),
        }
    }

    /// Formal derivative; the order drops by one.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return TruncSeries::zero(0);
        }
        TruncSeries {
            coeffs: (1..=n).map(|k| &self.coeffs[k] * BigInt::from(k)).collect(),
        }
    }

    /// Antiderivative with zero constant term; the order grows by one.
    pub fn integral(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / BigInt::from(k + 1));
        }
        TruncSeries { coeffs }
    }

    /// Multiplicative inverse by Newton iteration `u <- u (2 - f u)`.
    pub fn inverse(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::NotInvertible);
        }
        let n = self.order();
        let mut u = TruncSeries {
            coeffs: vec![self.coeffs[0].recip()],
        };
        let mut m = 0;
        while m < n {
            let m2 = (2 * m + 1).min(n);
            let f = self.truncate(m2);
            let ue = TruncSeries::from_rationals(&u.coeffs, m2);
            let e = TruncSeries::one(m2).sub(&f.mul(&ue));
            u = ue.add(&ue.mul(&e));
            m = m2;
        }
        Ok(u)
    }

    /// `exp(f)` for `f(0) = 0`, from `(exp f)' = f' exp f`:
    /// `n g_n = sum_{k=1..n} k f_k g_{n-k}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let n = self.order();
        let support: Vec<(usize, Rational)> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c * BigInt::from(k)))
            .collect();
        let mut g = Vec::with_capacity(n + 1);
        g.push(Rational::one());
        for m in 1..=n {
            let mut acc = Rational::zero();
            for (k, kf) in support.iter().take_while(|(k, _)| *k <= m) {
                acc += kf * &g[m - k];
            }
            g.push(acc / BigInt::from(m));
        }
        Ok(TruncSeries { coeffs: g })
    }

    /// `log(f)` for `f(0) = 1`: `n h_n = n f_n - sum_{k=1..n-1} k h_k f_{n-k}`.
    #[allow(clippy::needless_range_loop)]
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::ConstantTermNotOne);
        }
        let n = self.order();
        let mut h: Vec<Rational> = vec![Rational::zero(); n + 1];
        for m in 1..=n {
            let mut acc = &self.coeffs[m] * BigInt::from(m);
            for k in 1..m {
                if !self.coeffs[m - k].is_zero() && !h[k].is_zero() {
                    acc -= &h[k] * &self.coeffs[m - k] * BigInt::from(k);
                }
            }
            h[m] = acc / BigInt::from(m);
        }
        Ok(TruncSeries { coeffs: h })
    }

    /// `f^alpha` for `f(0) = 1`, from `f (f^a)' = a f' f^a`:
    /// `n g_n = sum_{k=1..n} (a k - (n - k)) f_k g_{n-k}`.
    pub fn pow_rational(&self, alpha: &Rational) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::ConstantTermNotOne);
        }
        let n = self.order();
        let support: Vec<(usize, &Rational)> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let mut g = Vec::with_capacity(n + 1);
        g.push(Rational::one());
        for m in 1..=n {
            let mut acc = Rational::zero();
            for &(k, fk) in support.iter().take_while(|(k, _)| *k <= m) {
                if g[m - k].is_zero() {
                    continue;
                }
                let w = alpha * BigInt::from(k) - Rational::from_integer(BigInt::from(m - k));
                acc += w * fk * &g[m - k];
            }
            g.push(acc / BigInt::from(m));
        }
        Ok(TruncSeries { coeffs: g })
    }

    /// `self(inner(x))` for `inner(0) = 0`, by Horner's rule over series.
    pub fn compose(&self, inner: &TruncSeries) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::CompositionInnerConstantNonzero);
        }
        let n = self.order().min(inner.order());
        let g = IntPoly::from_rationals(&inner.coeffs[..=n]);
        // acc_i = f_i + g acc_{i+1}, needed modulo x^{n-i+1} since it is
        // eventually multiplied by g^i = O(x^i)
        let mut acc = IntPoly::constant(&self.coeffs[n]);
        for i in (0..n).rev() {
            let len = n - i + 1;
            acc = if acc.is_zero() {
                IntPoly::zero()
            } else {
                acc.mul_trunc(&g, len)
            };
            acc.add_constant(&self.coeffs[i]);
            acc.reduce();
        }
        let mut coeffs = acc.into_rationals();
        coeffs.resize(n + 1, Rational::zero());
        Ok(TruncSeries { coeffs })
    }

    /// Compositional inverse `g` with `f(g(x)) = x + O(x^{N+1})`.
    ///
    /// Newton iteration `g <- g - (f(g) - x) / f'(g)`, doubling the number of
    /// correct coefficients each round; the result is checked by composition
    /// before it is returned.
    pub fn revert(&self) -> Result<Self> {
        let n = self.order();
        if !self.coeffs[0].is_zero() || n == 0 || self.coeffs[1].is_zero() {
            return Err(Error::ZeroLinearCoefficient);
        }
        let mut g = TruncSeries::from_rationals(&[Rational::zero(), self.coeffs[1].recip()], 1);
        if n == 1 {
            return Ok(g);
        }
        let fp = self.derivative();
        let mut m = 1;
        while m < n {
            let m2 = (2 * m + 1).min(n);
            let ge = TruncSeries::from_rationals(&g.coeffs, m2);
            let resid = self.truncate(m2).compose(&ge)?.sub(&TruncSeries::x(m2));
            // resid = O(x^{m+1}); divide it out so f'(g) is only needed to
            // order m2 - m - 1 <= N - 1
            let r = resid.shift_down(m + 1).ok_or(Error::ReversionCheckFailed)?;
            let k = m2 - m - 1;
            let d = fp.truncate(k).compose(&ge.truncate(k))?;
            let q = r.mul(&d.inverse()?).shift_up(m + 1);
            g = ge.sub(&q);
            m = m2;
        }
        if self.compose(&g)? != TruncSeries::x(n) {
            return Err(Error::ReversionCheckFailed);
        }
        Ok(g)
    }

    /// Coefficients as `"num/den"` strings.
    pub fn to_fraction_strings(&self) -> Vec<String> {
        self.coeffs
            .iter()
            .map(|c| format!("{}/{}", c.numer(), c.denom()))
            .collect()
    }

    pub fn from_fraction_strings(items: &[String]) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidArgument("empty coefficient list".into()));
        }
        let coeffs = items
            .iter()
            .map(|s| exact::parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(TruncSeries { coeffs })
    }
}

/// `c0 + c1*x + ... + cN*x^N`, omitting zero terms.
impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = exact::render(&c.abs());
            let term = match n {
                0 => mag,
                1 => format!("{mag}*x"),
                _ => format!("{mag}*x^{n}"),
            };
            match (first, c.is_negative()) {
                (true, false) => write!(f, "{term}")?,
                (true, true) => write!(f, "-{term}")?,
                (false, false) => write!(f, " + {term}")?,
                (false, true) => write!(f, " - {term}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Polynomial `num / den` with integer numerators and one positive
/// denominator.
#[derive(Clone, Debug)]
struct IntPoly {
    num: Vec<BigInt>,
    den: BigInt,
}

impl IntPoly {
    fn zero() -> Self {
        IntPoly {
            num: Vec::new(),
            den: BigInt::one(),
        }
    }

    fn constant(c: &Rational) -> Self {
        IntPoly {
            num: vec![c.numer().clone()],
            den: c.denom().clone(),
        }
    }

    fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    fn from_rationals(c: &[Rational]) -> Self {
        let mut den = BigInt::one();
        for r in c {
            if !r.denom().is_one() {
                den = den.lcm(r.denom());
            }
        }
        let num = c
            .iter()
            .map(|r| {
                if r.denom() == &den {
                    r.numer().clone()
                } else {
                    r.numer() * (&den / r.denom())
                }
            })
            .collect();
        IntPoly { num, den }
    }

    fn into_rationals(self) -> Vec<Rational> {
        let den = self.den;
        self.num.into_iter().map(|n| Rational::new(n, den.clone())).collect()
    }

    fn add_constant(&mut self, c: &Rational) {
        if c.is_zero() {
            return;
        }
        if self.num.is_empty() {
            self.num.push(BigInt::zero());
        }
        if c.denom().is_one() {
            self.num[0] += c.numer() * &self.den;
            return;
        }
        let l = self.den.lcm(c.denom());
        let s = &l / &self.den;
        if !s.is_one() {
            for n in &mut self.num {
                *n *= &s;
            }
        }
        self.num[0] += c.numer() * (&l / c.denom());
        self.den = l;
    }

    /// Divides out the content shared by the denominator and all numerators.
    fn reduce(&mut self) {
        let mut g = self.den.clone();
        for n in &self.num {
            if g.is_one() {
                return;
            }
            if !n.is_zero() {
                g = g.gcd(n);
            }
        }
        if self.num.iter().all(|n| n.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        if !g.is_one() {
            for n in &mut self.num {
                *n /= &g;
            }
            self.den /= &g;
        }
    }

    fn mul_trunc(&self, other: &IntPoly, len: usize) -> IntPoly {
        IntPoly {
            num: poly_mul(&self.num, &other.num, len),
            den: &self.den * &other.den,
        }
    }
}

/// Integer polynomial product modulo `x^len`.
fn poly_mul(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    if a.is_empty() || b.is_empty() {
        return vec![BigInt::zero(); len];
    }
    let nz_a = a.iter().filter(|c| !c.is_zero()).count();
    let nz_b = b.iter().filter(|c| !c.is_zero()).count();
    if nz_a.min(nz_b) <= 8 || len <= 16 {
        schoolbook(a, b, len)
    } else {
        kronecker(a, b, len)
    }
}

fn schoolbook(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    let nb: Vec<(usize, &BigInt)> = b.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for &(j, y) in &nb {
            if i + j >= len {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out
}

/// Packs signed coefficients into slots of `limbs` 32-bit digits.
fn pack(a: &[BigInt], limbs: usize) -> BigInt {
    let mut pos = vec![0u32; a.len() * limbs];
    let mut neg = vec![0u32; a.len() * limbs];
    for (i, c) in a.iter().enumerate() {
        let (sign, digits) = c.to_u32_digits();
        let target = if sign == Sign::Minus { &mut neg } else { &mut pos };
        target[i * limbs..i * limbs + digits.len()].copy_from_slice(&digits);
    }
    BigInt::from(BigUint::new(pos)) - BigInt::from(BigUint::new(neg))
}

/// Product by evaluation at `2^s`: every product coefficient fits in a slot
/// with `|c| < 2^(s-1)`, and adding `2^(s-1)` to each slot makes all slots
/// non-negative so they can be read back directly.
fn kronecker(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let bits_a = a.iter().map(|c| c.bits()).max().unwrap_or(0);
    let bits_b = b.iter().map(|c| c.bits()).max().unwrap_or(0);
    let terms = a.len().min(b.len()) as u64;
    let slot_bits = bits_a + bits_b + (64 - terms.leading_zeros() as u64) + 2;
    let limbs = slot_bits.div_ceil(32) as usize;
    let s = limbs * 32;

    let c = pack(a, limbs) * pack(b, limbs);
    let n_full = a.len() + b.len() - 1;
    let mut off = vec![0u32; n_full * limbs];
    for i in 0..n_full {
        off[i * limbs + limbs - 1] = 1 << 31;
    }
    let c = c + BigInt::from(BigUint::new(off));
    let (_, digits) = c.to_u32_digits();
    let half = BigInt::one() << (s - 1);
    let mut out: Vec<BigInt> = (0..len.min(n_full))
        .map(|i| {
            let lo = (i * limbs).min(digits.len());
            let hi = ((i + 1) * limbs).min(digits.len());
            BigInt::from(BigUint::from_slice(&digits[lo..hi])) - &half
        })
        .collect();
    out.resize(len, BigInt::zero());
    out
}
